"""Availability of an N-board redundant component.

Walks the birth-death model from one board to four: steady-state probability
that every board is down, and the mean time to total failure if nothing is
ever repaired.  Run: python3 demos/01_availability_table.py
"""

from redwsn import (
    BirthDeathModel,
    build_generator,
    failure_probability_table,
    mttf_non_repairable,
    steady_state_closed_form,
    steady_state_linear_solve,
)

LAM = 1e-4  # board failures per hour
MU = 20.83e-3  # repairs per hour (about one per 48 h)

print(f"failure rate {LAM}/h, repair rate {MU}/h\n")
print(f"{'N':>2}  {'P(all boards down)':>20}  {'MTTF w/o repair (h)':>20}")
for n, pi0 in failure_probability_table(LAM, MU, n_max=4):
    print(f"{n:>2}  {pi0:>20.4e}  {mttf_non_repairable(n, LAM):>20.0f}")

# The closed form and a direct linear solve of pi Q = 0 agree.
model = BirthDeathModel(4, LAM, MU)
closed = steady_state_closed_form(model)
solved = steady_state_linear_solve(build_generator(model))
print("\nfull stationary distribution for N = 4 (state = working boards):")
for state, (a, b) in enumerate(zip(closed, solved)):
    print(f"  pi_{state}: closed form {a:.6e}   linear solve {b:.6e}")
