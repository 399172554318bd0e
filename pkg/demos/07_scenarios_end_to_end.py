"""
End-to-end usage patterns
=========================

The three hybrid usage patterns as full system runs, plus the single-QC
versus per-job comparison the co-scheduling model exists for.  Each run is
one hybrid job on a simulated cluster, reported deterministically.
"""
import math

from qorch.resman import Model
from qorch.scenarios import run_ensemble, run_in_sequence, run_single_circuit
from qorch.system import System

system = System()

# Single-circuit: one static GHZ program sampled repeatedly.
report = run_single_circuit(n=3, shots=10000, seed=7, system=system)
print("single_circuit:", report.answer)
print("  distribution:", dict(sorted(report.tasks[0].counts.items())))

# Ensemble: independent random circuits aggregated classically; under the
# per-job model they run concurrently on the job's simulation partition.
report = run_ensemble(k=4, n=3, layers=2, shots=5000, seed=7, system=system,
                      sim_nodes=4)
print("\nensemble:", report.answer)
print("  queue waits:", [t.queue_wait for t in report.tasks])

# In-sequence: teleportation with mid-circuit measurement and feed-forward;
# a classical loop bisects the angle until P(1) hits one half.
report = run_in_sequence(theta=0.3, shots_per_iter=10000, seed=7, system=system)
print("\nin_sequence:", report.answer)
for i, fields in enumerate(report.iterations):
    print(f"  iter {i}: theta={float(fields['theta']):.4f} p1={fields['p1']}")
print(f"  (pi/2 = {math.pi / 2:.4f})")

# Same ensemble under both integration models: contending for one shared
# device costs more queue time than a dedicated simulation partition.
single = run_ensemble(8, 3, 1, 1000, seed=9, system=system,
                      model=Model.SINGLE_QC, sim_nodes=0)
per_job = run_ensemble(8, 3, 1, 1000, seed=9, system=system,
                       model=Model.PER_JOB, sim_nodes=2)
print("\nmean queue wait, single_qc:", single.metrics["mean_queue_wait"])
print("mean queue wait, per_job:  ", per_job.metrics["mean_queue_wait"])
