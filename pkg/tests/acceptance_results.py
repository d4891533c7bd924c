"""Shared store for acceptance verdicts, printed at the end of the session."""

RESULTS = {}


def record(key, ok, detail):
    RESULTS[key] = (bool(ok), detail)
    print(f"criterion {key}: {'PASS' if ok else 'FAIL'} - {detail}")
