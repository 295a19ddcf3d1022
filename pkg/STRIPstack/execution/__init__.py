"""Run orchestration: configuration parsing, dispatch and run logging."""
