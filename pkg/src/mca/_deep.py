"""Run deeply recursive evaluation on a thread with a large stack.

The evaluator follows the recursive definition of call-by-value evaluation
literally, so a divergent term burns one Python frame chain per application.
Most runs fit the default stack; the rest are retried on a worker thread
with a large stack.  Evaluation is pure, so a retry is harmless.
"""
from __future__ import annotations

import sys
import threading

_STACK_BYTES = 512 * 1024 * 1024
_RECURSION = 2_000_000
# Safe on the default 8MB main-thread stack.
_MAIN_RECURSION = 12_000

_local = threading.local()


def call(fn, *args, fuel: int = 0):
    """Call ``fn(*args)``, moving to a big-stack worker thread if it recurses too deep."""
    if getattr(_local, "deep", False):
        return fn(*args)
    sys.setrecursionlimit(_MAIN_RECURSION)
    try:
        return fn(*args)
    except RecursionError:
        pass

    box: dict = {}

    def worker():
        _local.deep = True
        try:
            box["value"] = fn(*args)
        except BaseException as exc:  # re-raised on the calling thread
            box["error"] = exc

    sys.setrecursionlimit(_RECURSION)
    old = threading.stack_size()
    threading.stack_size(_STACK_BYTES)
    try:
        t = threading.Thread(target=worker, name="mca-deep")
        t.start()
    finally:
        threading.stack_size(old)
    t.join()
    sys.setrecursionlimit(_MAIN_RECURSION)
    if "error" in box:
        raise box["error"]
    return box["value"]
