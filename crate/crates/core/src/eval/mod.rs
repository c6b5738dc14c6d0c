//! Evaluation harness: ground truth, precision/recall@k, the brute-force
//! oracle, a synthetic testbed generator, sampling ablations and timing.

mod ablation;
mod metrics;
mod oracle;
mod testbed;
mod timing;
mod truth;

pub use ablation::{evaluate, sampling_ablation, AblationReport, AblationRun, MetricDelta};
pub use metrics::{precision_recall_at_k, KMetrics, MetricsReport, QueryOutcome};
pub use oracle::{brute_force_topk, BruteForceOracle};
pub use testbed::{generate_testbed, NoiseProfile, PlantedPair, Testbed, TestbedSpec, ValueDomain};
pub use timing::{measure_timing, QueryTiming, TimingReport};
pub use truth::{load_ground_truth, write_ground_truth, GroundTruthSet, TruthEntry, TruthLoad, TruthRow};
