"""Where do random-waypoint nodes spend their time, and what does that do to links?

Nodes crowd the middle of the area, so a receiver at the centre hears more
interference than one in a corner.  This script prints the density profile
across a 5 x 2 rectangle and then the link success probability at a few
receiver positions.

    python3 demos/density_and_links.py
"""

import numpy as np

from rwpnet.channel import ChannelParams, NetworkConfig, connection_probability
from rwpnet.geometry import Rectangle
from rwpnet.rwpm import StationaryDistribution

dom = Rectangle(5.0, 2.0)
moving = StationaryDistribution(dom, 0.0, "exact")
uniform_density = 1.0 / dom.area

print("density along the long axis, relative to uniform")
for x in np.linspace(0.0, 5.0, 6):
    print(f"  x={x:4.1f}  {moving.pdf(x, 0.0) / uniform_density:6.3f}")

# the separable polynomial is a popular stand-in; see how far off it is
approx = StationaryDistribution(dom, 0.0, "approximate")
print("\nexact vs polynomial density at a few points")
for pt in [(0.0, 0.0), (2.5, 1.0), (4.5, 1.8)]:
    print(f"  {pt}  exact {moving.pdf(*pt):.5f}  polynomial {approx.pdf(*pt):.5f}")

net = NetworkConfig(40, moving)
params = ChannelParams(eta=4.0, gamma=1.0)
print("\nP(link of length 0.5 succeeds), 40 nodes, full interference")
for label, pt in [("centre", (0.0, 0.0)), ("edge", (5.0, 0.0)), ("corner", (5.0, 2.0))]:
    poisson = connection_probability(net, params, 0.5, pt)
    binomial = connection_probability(net, params, 0.5, pt, process="binomial")
    print(f"  {label:6s}  Poisson {poisson:.3f}   fixed-N {binomial:.3f}")

# pausing spreads nodes out evenly, which helps the centre and hurts the corner
paused = NetworkConfig(40, StationaryDistribution(dom, 1.0))
print("\nsame links when every node is paused (uniform placement)")
for label, pt in [("centre", (0.0, 0.0)), ("corner", (5.0, 2.0))]:
    print(f"  {label:6s}  {connection_probability(paused, params, 0.5, pt):.3f}")
