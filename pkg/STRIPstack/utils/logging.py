from .serialization import is_registered,to_dict,serialize_collection,deserialize_collection
from . import settings
import csv
import math
from typing import List,Optional


def debug_print(prefix : str, verbosity : int, format : str, *args):
    """Prints `format % args` prefixed with `prefix` if the run verbosity is
    at least `verbosity`."""
    if settings.get('run.verbosity',0) >= verbosity:
        if args:
            print(prefix,format % args)
        else:
            print(prefix,format)


def _format_value(v) -> str:
    if isinstance(v,bool):
        return str(int(v))
    if isinstance(v,float):
        if math.isnan(v) or math.isinf(v):
            return str(v)
        return repr(v)
    return str(v)


class Logfile:
    """A table log of dicts or registered dataclasses, one row per message.

    Two formats are supported: ``'csv'`` writes a header row followed by one
    comma-separated row per message, with floats written with ``repr`` so the
    log reproduces values exactly; ``'jsonl'`` writes one JSON object per line.
    No wall-clock fields are added, so identical runs give identical files.
    """
    def __init__(self, filename : str, columns : Optional[List[str]] = None, format : str = 'csv', mode='w'):
        if format not in ('csv','jsonl'):
            raise ValueError("Logfile format must be 'csv' or 'jsonl'")
        self.filename = filename
        self.columns = columns
        self.format = format
        self.mode = mode
        self.file = open(filename,mode,newline='')
        self.writer = None
        self.rows_written = 0

    def log(self, message, fields : Optional[List[str]] = None) -> None:
        """Logs a message.

        Arguments:
            message: a dict or instance of a registered dataclass.
            fields (list, optional): keys to extract from the message.
                Defaults to the logfile columns, or all keys.
        """
        if self.mode != 'w':
            raise RuntimeError("Logfile is not open for writing")
        if not isinstance(message,dict):
            if not is_registered(message):
                raise ValueError("Can only log dicts or registered dataclasses")
            message = to_dict(message)
        if fields is None:
            fields = self.columns
        if fields is not None:
            message = {k:message[k] for k in fields}
        if self.format == 'jsonl':
            self.file.write(serialize_collection(message))
            self.file.write('\n')
        else:
            if self.writer is None:
                if self.columns is None:
                    self.columns = list(message.keys())
                self.writer = csv.writer(self.file, lineterminator='\n')
                self.writer.writerow(self.columns)
            self.writer.writerow([_format_value(message[k]) for k in self.columns])
        self.rows_written += 1

    def read(self) -> List[dict]:
        """Reads all rows.  CSV values are returned as floats where possible."""
        if self.mode != 'r':
            raise RuntimeError("Logfile is not open for reading")
        if self.format == 'jsonl':
            return [deserialize_collection(line) for line in self.file if line.strip()]
        rows = []
        for row in csv.DictReader(self.file):
            parsed = {}
            for k,v in row.items():
                try:
                    parsed[k] = float(v)
                except ValueError:
                    parsed[k] = v
            rows.append(parsed)
        return rows

    def flush(self):
        self.file.flush()

    def close(self):
        """Cleanly closes the log file."""
        if self.file is not None:
            self.file.close()
            self.file = None

    def __enter__(self):
        return self

    def __exit__(self, *args):
        self.close()
