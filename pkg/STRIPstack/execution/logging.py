from __future__ import annotations
from ..utils import serialization,logging,config,settings,snapshot
from ..utils.errors import StripError
from ..state.grid import Field
from typing import List,Optional,Any
import time
import datetime
import json
import os
import subprocess

class LoggingManager:
    """A top level manager of the run output folder.  This is responsible for
    creating the folder, the settings and metadata files, and for writing
    summaries, snapshots, tables and error records."""
    def __init__(self):
        self.log_folder = None        # type: Optional[str]
        self.run_metadata = dict()    # type: dict
        self.run_metadata['events'] = []
        self.run_metadata['exit_reason'] = 'unknown'
        self.tables = []              # type: List[logging.Logfile]

    def set_log_folder(self, folder : str, run_config : Optional[dict] = None) -> None:
        os.makedirs(folder,exist_ok=True)
        self.log_folder = folder

        #save settings.yaml, with the resolved run configuration
        saved = dict(settings.settings())
        if run_config is not None:
            saved['run_config'] = run_config
        config.save_config(os.path.join(folder,'settings.yaml'),saved)

        #save meta.yaml
        self.run_metadata['start_time'] = time.time()
        self.run_metadata['start_time_human_readable'] = datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        try:
            git_commit_id = subprocess.check_output(['git','rev-parse','HEAD'],stderr=subprocess.DEVNULL)
            self.run_metadata['git_commit_id'] = git_commit_id.decode('utf-8').strip()
        except (OSError,subprocess.CalledProcessError):
            self.run_metadata['git_commit_id'] = None
        self.dump_log_metadata()

    def path(self, name : str) -> str:
        return os.path.join(self.log_folder,name) if self.log_folder else name

    def close(self):
        for t in self.tables:
            t.close()
        self.tables = []
        if self.log_folder:
            self.run_metadata['end_time'] = time.time()
            self.dump_log_metadata()

    def dump_log_metadata(self):
        if not self.log_folder:
            return
        config.save_config(os.path.join(self.log_folder,'meta.yaml'),self.run_metadata)

    def event(self, event_description : str):
        """Logs an event to the metadata."""
        self.run_metadata['events'].append({'time':time.time(),'description':event_description})
        self.dump_log_metadata()

    def set_exit_reason(self, reason : str, code : int) -> None:
        self.run_metadata['exit_reason'] = reason
        self.run_metadata['exit_code'] = code
        self.dump_log_metadata()

    def table(self, name : str, columns : Optional[List[str]] = None) -> logging.Logfile:
        """Opens a CSV table in the log folder; closed with the manager."""
        t = logging.Logfile(self.path(name),columns=columns)
        self.tables.append(t)
        return t

    def write_summary(self, name : str, summary : Any) -> str:
        """Writes a JSON summary (a dict, possibly holding registered
        dataclasses) with sorted keys."""
        fn = self.path(name)
        with open(fn,'w') as f:
            f.write(serialization.serialize_collection(summary))
            f.write('\n')
        return fn

    def write_snapshot(self, name : str, u : Field, params : Optional[dict] = None) -> str:
        fn = snapshot.save_field(self.path(name),u,params)
        self.event('snapshot '+os.path.basename(fn))
        return fn

    def write_error(self, err : BaseException) -> dict:
        """Writes error.json; domain errors keep their machine-readable code."""
        if isinstance(err,StripError):
            rec = err.to_record()
        else:
            rec = {'error':'internal','message':str(err),'type':err.__class__.__name__}
        if self.log_folder:
            with open(self.path('error.json'),'w') as f:
                json.dump(rec,f,sort_keys=True,indent=1)
                f.write('\n')
            self.event('error '+rec['error'])
        return rec
