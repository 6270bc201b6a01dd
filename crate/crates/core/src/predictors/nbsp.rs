//! F-layer-only features: seven degree features and sixteen signed directed
//! triad counts over common F-neighbors of the pair.

use crate::error::{Error, Result};
use crate::metapath::{Excluding, FeatureRow};
use crate::net::{embeddedness, Direction, NetworkView, NodeId, RelationStep, Sign};

pub const NBSP_WIDTH: usize = 23;

/// Cell for edge u↔w (`u_to_w`, sign) followed by w↔v (`w_to_v`, sign).
pub fn triad_index(u_to_w: bool, first: Sign, w_to_v: bool, second: Sign) -> usize {
    let bit = |b: bool| usize::from(!b);
    let sbit = |s: Sign| usize::from(!s.is_positive());
    8 * bit(u_to_w) + 4 * sbit(first) + 2 * bit(w_to_v) + sbit(second)
}

pub fn nbsp_column_names() -> Vec<String> {
    let mut names: Vec<String> =
        ["in_pos_v", "in_neg_v", "out_pos_u", "out_neg_u", "in_total_v", "out_total_u", "embeddedness"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    let mut triads = vec![String::new(); 16];
    for uw in [true, false] {
        for s1 in Sign::BOTH {
            for wv in [true, false] {
                for s2 in Sign::BOTH {
                    triads[triad_index(uw, s1, wv, s2)] = format!(
                        "tri_{}{}_{}{}",
                        if uw { "uw" } else { "wu" },
                        s1.symbol(),
                        if wv { "wv" } else { "vw" },
                        s2.symbol()
                    );
                }
            }
        }
    }
    names.extend(triads);
    names
}

fn count_step<V: NetworkView + ?Sized>(view: &V, node: NodeId, step: RelationStep) -> u64 {
    let mut c = 0;
    view.for_each_neighbor(node, step, |_| c += 1);
    c
}

/// Degree and triad features of (u, v) on the F layer, with the target
/// edge itself excluded.
pub fn nbsp_features<V: NetworkView + ?Sized>(
    view: &V,
    u: NodeId,
    v: NodeId,
    label: Option<Sign>,
) -> Result<FeatureRow> {
    if u == v {
        return Err(Error::Domain(format!("NB-SP features need distinct endpoints, got {u} twice")));
    }
    let view = Excluding::new(view, u, v);
    let fwd = |s| RelationStep::signed(Direction::Forward, s);
    let inv = |s| RelationStep::signed(Direction::Inverse, s);
    let in_pos = count_step(&view, v, inv(Sign::Positive));
    let in_neg = count_step(&view, v, inv(Sign::Negative));
    let out_pos = count_step(&view, u, fwd(Sign::Positive));
    let out_neg = count_step(&view, u, fwd(Sign::Negative));
    let mut counts =
        vec![in_pos, in_neg, out_pos, out_neg, in_pos + in_neg, out_pos + out_neg, embeddedness(&view, u, v)? as u64];

    let mut nu = view.neighbors(u, RelationStep::any_f(Direction::Forward));
    nu.extend(view.neighbors(u, RelationStep::any_f(Direction::Inverse)));
    nu.sort_unstable();
    nu.dedup();
    let mut nv = view.neighbors(v, RelationStep::any_f(Direction::Forward));
    nv.extend(view.neighbors(v, RelationStep::any_f(Direction::Inverse)));
    nv.sort_unstable();
    nv.dedup();

    let mut triads = [0u64; 16];
    for &w in nu.iter().filter(|w| nv.binary_search(w).is_ok()) {
        if w == u || w == v {
            continue;
        }
        let first = [(true, view.f_sign(u, w)), (false, view.f_sign(w, u))];
        let second = [(true, view.f_sign(w, v)), (false, view.f_sign(v, w))];
        for &(uw, s1) in &first {
            let Some(s1) = s1 else { continue };
            for &(wv, s2) in &second {
                if let Some(s2) = s2 {
                    triads[triad_index(uw, s1, wv, s2)] += 1;
                }
            }
        }
    }
    counts.extend_from_slice(&triads);
    Ok(FeatureRow { initiator: u, recipient: v, counts, label })
}
