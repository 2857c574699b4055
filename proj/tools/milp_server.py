#!/usr/bin/env python3
"""Long-running MILP solver: one JSON request per stdin line, one JSON
response per stdout line. Built on scipy.optimize.milp (HiGHS).

Request:  {"action": "solve", "obj": [...], "lb": [...], "ub": [...],
           "integrality": [0|1, ...],
           "rows": [{"lb": x|null, "ub": x|null, "terms": [[col, coef]...]}],
           "rel_gap": 0.0, "time_limit": seconds|null}
Response: {"status": "optimal|limit|infeasible|unbounded|error",
           "objective": f, "values": [...], "gap": f, "message": s}
null bounds mean unbounded on that side. Also answers {"action": "ping"}
and exits on {"action": "quit"}.
"""

import json
import os
import sys

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp


def _arr(values, inf_sign):
    out = np.empty(len(values))
    for i, v in enumerate(values):
        out[i] = inf_sign * np.inf if v is None else float(v)
    return out


def solve(req):
    obj = np.asarray(req["obj"], dtype=float)
    n = obj.size
    lb = _arr(req["lb"], -1.0)
    ub = _arr(req["ub"], +1.0)
    integrality = np.asarray(req["integrality"], dtype=np.uint8)
    rows = req["rows"]

    constraints = []
    if rows:
        data, ri, ci = [], [], []
        for r, row in enumerate(rows):
            for col, coef in row["terms"]:
                ri.append(r)
                ci.append(col)
                data.append(coef)
        a = sparse.csc_matrix((data, (ri, ci)), shape=(len(rows), n))
        rlb = _arr([r["lb"] for r in rows], -1.0)
        rub = _arr([r["ub"] for r in rows], +1.0)
        constraints = [LinearConstraint(a, rlb, rub)]

    options = {
        "presolve": True,
        "disp": False,
        "mip_rel_gap": float(req.get("rel_gap") or 0.0),
    }
    if req.get("time_limit"):
        options["time_limit"] = float(req["time_limit"])

    res = milp(c=obj, constraints=constraints, integrality=integrality,
               bounds=Bounds(lb, ub), options=options)

    status = {0: "optimal", 1: "limit", 2: "infeasible", 3: "unbounded"}.get(
        res.status, "error")
    out = {"status": status, "message": str(res.message)}
    if res.x is not None:
        out["values"] = [float(v) for v in res.x]
        out["objective"] = float(res.fun)
        gap = getattr(res, "mip_gap", None)
        if gap is not None and np.isfinite(gap):
            out["gap"] = float(gap)
    return out


def main():
    try:
        for line in sys.stdin:
            line = line.strip()
            if not line:
                continue
            try:
                req = json.loads(line)
                action = req.get("action", "solve")
                if action == "quit":
                    return
                if action == "ping":
                    print(json.dumps({"status": "ok"}), flush=True)
                    continue
                print(json.dumps(solve(req)), flush=True)
            except BrokenPipeError:
                return
            except Exception as exc:  # keep serving after a bad request
                print(json.dumps({"status": "error", "message": str(exc)}),
                      flush=True)
    finally:
        # the driver may close both pipes without reading a farewell; make
        # sure interpreter teardown does not trip over the dead descriptor
        try:
            sys.stdout.flush()
        except Exception:
            pass
        try:
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        except Exception:
            pass


if __name__ == "__main__":
    main()
