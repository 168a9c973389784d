"""riskdrive: behavior-aware risk-sensitive planning among simulated drivers.

Subpackages:

* ``sim`` — IDM/MOBIL multi-lane highway simulation
* ``graph`` — dynamic geometric graphs and temporal Laplacians
* ``behavior`` — centrality-based behavior scoring (SLE/SIE, annotations)
* ``risk`` — behavior-score-to-risk-parameter calibration and clustering
* ``game`` — risk-sensitive LQ Nash games and receding-horizon planning
* ``auction`` — behavior-bid turn ordering with mechanism checkers
* ``experiments`` — reproducible experiment suite behind the CLI
* ``service`` — realtime session loop and JSON protocol
"""

__version__ = "0.1.0"
