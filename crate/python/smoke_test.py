"""Smoke test for the pyrarefied extension module.

Build and install it first, for example with `pip install .` or
`maturin develop`, then run `python python/smoke_test.py`.
"""

import pyrarefied as pr

assert pr.sum_f(3, 0, 8) == 6
assert pr.sum_f(3, 0, 87) == 55
assert pr.sum_g(3, 0, 2) == 2
assert pr.pseudopower(3, 4, 55) == 129
assert pr.to_digits(-5, -2) == [1, 1, 1, 1]
assert pr.from_digits([1, 1, 1, 1], -2) == -5

add = pr.Automaton.add(-2)
assert add.tracks == [-2, -2, -2]
assert add.accepts([3, -7, -4]) and not add.accepts([3, -7, -3])
lt = pr.Automaton.lt(4)
assert lt.complement().minimize().equivalent(lt.complement())
assert pr.Automaton.from_text(lt.to_text()).equivalent(lt)

wb = pr.Workbench(brute=False)
f30 = wb.automaton("f30")
assert f30.states == 16, f30
assert f30.accepts([87, 55]) and not f30.accepts([87, 54])
assert wb.table("f30", 8)[-1] == 6

verdicts = wb.query('eval pos "?msd_4 An,y (n>=1 & $f30(n,y)) => ?msd_3 y>0":')
assert verdicts == [("pos", True)], verdicts

passed, report = wb.verify("b34")
assert passed, report

try:
    wb.automaton("f99")
except ValueError as e:
    assert "unknown function" in str(e)
else:
    raise AssertionError("unknown name accepted")

print("pyrarefied smoke test passed")
