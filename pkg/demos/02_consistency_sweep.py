"""How far the diagonalized system is from Whitham-Boussinesq.

Run a small (mu, eps) sweep with the packaged harness and read off the
fitted exponents of the residual.  Both should sit near one: the residual
shrinks like mu*eps.
"""
from dataclasses import replace

from whithamlab.harness.config import ExperimentKind, default_config
from whithamlab.harness.experiments import run_experiment
from whithamlab.harness.report import summary

cfg = default_config(ExperimentKind.CONSISTENCY_DIAG)
cfg = cfg.with_(stepper=replace(cfg.stepper, t_end=4.0))
report = run_experiment(cfg, workers=2)

for row in report.values("residual_max"):
    print(f"mu={row.mu:<6} eps={row.eps:<6} max residual {row.value:.3e}")
print()
print(summary(report))
