use crate::machine::{Snapshot, TailSummary};

/// Final-loop recognition for a candidate loop from `s1` to `s2`.
///
/// `between` holds the milestones recorded strictly inside the loop and
/// `stretches` the summaries of the segments covering it. The loop is final
/// iff both endpoints coincide and every cell holding 1 at `s2` holds 1 at
/// every milestone and throughout every segment of the loop. Without that,
/// some cell would drop to 0 at the next limit of the loop and the endpoint
/// snapshot would not come back.
pub fn detect_final_loop(
    s1: &Snapshot,
    s2: &Snapshot,
    between: &[Snapshot],
    stretches: &[TailSummary],
) -> bool {
    if !s1.config_eq(s2) {
        return false;
    }
    let ones = &s2.config;
    let milestones_keep = between
        .iter()
        .all(|m| ones.work.is_subset(&m.config.work) && ones.output.is_subset(&m.config.output));
    milestones_keep && stretches.iter().all(|t| t.keeps_ones_of(ones))
}
