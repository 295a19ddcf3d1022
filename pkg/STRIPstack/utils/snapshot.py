"""Field snapshots: a JSON header frame plus a row-major little-endian float64
sidecar, and a CSV export of (x, y, value) rows."""
from ..state.grid import Field, FieldSnapshotHeader
from . import serialization
import csv
import os
import numpy as np
from typing import Optional,Tuple


def _paths(path : str) -> Tuple[str,str]:
    base = path[:-5] if path.endswith('.json') else path
    return base + '.json', base + '.bin'


def save_field(path : str, u : Field, params : Optional[dict] = None) -> str:
    """Writes PATH.json and PATH.bin; returns the header path."""
    header_fn,payload_fn = _paths(path)
    folder = os.path.dirname(header_fn)
    if folder:
        os.makedirs(folder,exist_ok=True)
    header = FieldSnapshotHeader(grid=u.grid, payload=os.path.basename(payload_fn), params=dict(params or {}))
    np.ascontiguousarray(u.values,dtype='<f8').tofile(payload_fn)
    with open(header_fn,'w') as f:
        serialization.save(header,f)
    return header_fn


def load_field(path : str) -> Tuple[Field,dict]:
    """Reads a snapshot written by save_field; returns (field, params)."""
    header_fn,_ = _paths(path)
    with open(header_fn,'r') as f:
        header = serialization.load(f)
    if not isinstance(header,FieldSnapshotHeader):
        raise IOError("{} is not a field snapshot header".format(header_fn))
    payload_fn = os.path.join(os.path.dirname(header_fn),header.payload)
    data = np.fromfile(payload_fn,dtype=header.dtype)
    if data.size != header.grid.nx*header.grid.ny:
        raise IOError("Snapshot payload {} has {} values, header expects {}x{}".format(payload_fn,data.size,header.grid.nx,header.grid.ny))
    values = data.reshape(header.grid.shape,order=header.order).astype(float)
    return Field(header.grid,values),header.params


def export_csv(path : str, u : Field) -> None:
    """Writes (x, y, value) rows, y fastest."""
    X,Y = u.grid.mesh()
    with open(path,'w',newline='') as f:
        w = csv.writer(f,lineterminator='\n')
        w.writerow(['x','y','value'])
        for x,y,v in zip(X.ravel(),Y.ravel(),u.values.ravel()):
            w.writerow([repr(float(x)),repr(float(y)),repr(float(v))])
