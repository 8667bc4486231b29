"""Grid convergence on the smooth advected density wave and the Alfven wave.

The convergence tables use a time step that shrinks faster than dx for the
5th- and 7th-order schemes, so the third-order time integrator does not
mask the spatial order. Orders 3, 5 and 7 are shown for the density wave;
the Alfven wave is shown at order 5 in B_y.

``python demos/convergence_study.py`` finishes in a couple of minutes.
"""
from cgl1d import RunConfig, convergence_table

for order, meshes in ((3, (10, 20, 40, 80, 160)), (5, (10, 20, 40, 80, 160)), (7, (10, 20, 40, 80))):
    _, text = convergence_table(RunConfig(problem="accuracy", order=order, solver="hll"), meshes)
    print(text, end="\n\n")

# The third order scheme stays near second order here: its nonlinear
# weights lose accuracy at the smooth extrema of sin(2 pi x).

_, text = convergence_table(RunConfig(problem="alfven", order=5, solver="hlli"), (10, 20, 40, 80))
print(text)
# The last column uses dx * max|e|, which converges one order faster than
# the L1 norm on these smooth problems.
