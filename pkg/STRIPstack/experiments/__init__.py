"""Offline experiments run over families of strip problems."""
