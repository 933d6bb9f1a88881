"""Shared record of acceptance outcomes, printed in the pytest summary."""

RESULTS = {}


def record(number, ok, detail):
    RESULTS[number] = (bool(ok), detail)
    print(f"CRITERION {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok
