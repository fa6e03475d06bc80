"""Smoke test for the semireg_py extension.

    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import math

import semireg_py as sr


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


names = sr.catalog_names()
assert "polar2" in names and "sphere2" in names, names

v, grad, hess = sr.jet("x^2*y + sin(y)", ["x", "y"], [1.5, 0.3])
assert close(v, 2.25 * 0.3 + math.sin(0.3))
assert close(grad[0], 2 * 1.5 * 0.3) and close(grad[1], 2.25 + math.cos(0.3))
assert close(hess[0][1], 3.0) and close(hess[1][1], -math.sin(0.3))

sphere = sr.Metric.load("sphere2")
th = math.pi / 3
table = sphere.riemann_table([th, 0.2])
assert close(table[0 * 8 + 1 * 4 + 0 * 2 + 1], -math.sin(th) ** 2), table
for name, r in sphere.symmetry_residuals([th, 0.2]):
    assert r < 1e-10, (name, r)

polar = sr.Metric(["u", "v"], [((0, 0), "1"), ((1, 1), "u^2")], name="polar")
d = polar.decompose([0.0, 0.5])
assert d["rank"] == 1, d
verdict, resid = polar.classify([[2.0, 0.5], [0.0, 0.5]])
assert verdict == "radical-stationary" and resid <= 1e-10, (verdict, resid)

light = sr.Metric.load("lightcone2")
verdict, resid = light.classify([[1.0, 0.5], [0.0, 0.5]])
assert verdict == "not-radical-stationary" and close(resid, 0.5, 1e-9), (verdict, resid)

r = polar.first_structural_residual(["1", "0"], ["u", "v"], ["0", "1"], [1.2, 0.4])
assert r["rel_residual"] < 1e-9, r

text, code = sr.check(sr.Metric.load("polar2"))
assert code == 0 and "verdict=semi-regular-probe-passed" in text.splitlines()[-1], text
text, code = sr.verify(sphere, seed=3, points=5)
assert code == 0, text

try:
    sr.Metric(["x"], [((0, 0), "w")])
except ValueError as e:
    assert "w" in str(e)
else:
    raise AssertionError("undeclared coordinate accepted")

print("smoke test ok:", len(names), "catalog entries")
