"""Train all four bar/beam cases and compare.

Uses a shortened budget so the script finishes in a few seconds; pass the
default ``TrainConfig()`` to reproduce the full 10000-epoch comparison
(about a minute).
"""

from pinnbc import TrainConfig, run_suite
from pinnbc.trainer import CASES

config = TrainConfig(epochs=2000)
suite = run_suite(config)

print("case  problem  strategy   error %     |dev x0|     |dev xL|")
for (case, err, d0, dl), (problem, strategy) in zip(suite.summary(), CASES.values()):
    print(f"{case:<5} {problem:<8} {strategy:<10} {err:<11.4f} {d0:<12.3e} {dl:.3e}")

# The hybrid beam keeps both supports at exactly zero; the penalised beam does not.
for report in suite.results:
    head, tail = report.history[0], report.history[-1]
    print(f"{report.label}: loss {head[1]:.3e} -> {tail[1]:.3e}")
