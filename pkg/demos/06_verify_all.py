"""Run the full inequality verification report.

Every computable property of the stack (discrete identities, penalization
shape, noise bounds, operator inequalities, solver contracts, the step
identity) is checked and reported with measured value, bound and slack.
The same report backs the `plapsim verify` subcommand, which exits
nonzero on any failure.
"""

from plapsim import verify_all

report = verify_all()
width = max(len(p["property"]) for p in report.properties)
for rec in report.properties:
    flag = "PASS" if rec["passed"] else "FAIL"
    slack = "" if rec["slack"] is None else f"slack = {rec['slack']:.3e}"
    print(f"{flag}  {rec['module']:8s} {rec['property']:<{width}s}  {slack}")

print()
print(f"overall: {'PASS' if report.passed else 'FAIL'} "
      f"({len(report.properties)} properties)")
print("coverage of module invariants:",
      ", ".join(f"{m}:{len(v)}" for m, v in sorted(report.coverage.items())))
