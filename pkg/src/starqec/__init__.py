"""starqec: error-corrected two-site stellar interferometry at desk scale.

Simulates the pipeline from a weak two-mode thermal source through dark-state
photon capture, teleportation onto a stabilizer code, local noise, syndrome
recovery, and Fisher-information analysis, plus the analytic threshold bounds
for large codes.
"""

__version__ = "0.1.0"
