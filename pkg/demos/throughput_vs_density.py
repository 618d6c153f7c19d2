"""How many neighbours can a receiver actually decode as the network grows?

With no interference the count grows linearly with the number of nodes.
Once interference is switched on there is a sweet spot: more nodes mean more
candidate transmitters but also more noise from everyone else.  A Monte-Carlo
run checks one point of the curve.

    python3 demos/throughput_vs_density.py
"""

import numpy as np

from rwpnet.channel import ChannelParams, NetworkConfig
from rwpnet.geometry import Disk
from rwpnet.montecarlo import empirical_mu
from rwpnet.rwpm import StationaryDistribution
from rwpnet.throughput import laplace_cache, mu_numeric

dist = StationaryDistribution(Disk(5.0), 0.0, "exact")
centre = (0.0, 0.0)
counts = np.array([5, 20, 60, 120, 235, 500, 1000, 2000])

quiet = ChannelParams(eta=4.0, gamma=0.0)
noisy = ChannelParams(eta=4.0, gamma=0.5, epsilon=0.01)
cache = laplace_cache(dist, noisy, centre)
mu_quiet = mu_numeric(dist, quiet, centre, counts)
mu_noisy = mu_numeric(dist, noisy, centre, counts, cache=cache)

print("   N   no interference   half interference")
for n, q, i in zip(counts, mu_quiet, mu_noisy):
    print(f"{n:5d}   {q:15.3f}   {i:17.3f}")
print(f"\npeak with interference near N={counts[np.argmax(mu_noisy)]}")

n = 60
est = empirical_mu(NetworkConfig(n, dist), noisy, centre, trials=20_000, seed=1)
lo, hi = est.ci95
exact = mu_numeric(dist, noisy, centre, n, process="binomial")
print(f"\nsimulated mu at N={n}: {est.value:.3f}  (95% interval {lo:.3f} to {hi:.3f})")
print(f"analytic, fixed node count: {exact:.3f}")
