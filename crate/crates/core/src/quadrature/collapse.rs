//! Delta collapse: integrals containing a massless commutator are reduced by
//! one dimension by pinning a time variable to each lightcone locus.

use num_complex::Complex64;

use super::nested::Domain;
use super::Piece;
use crate::correlators::CommutatorSupport;

/// Loci closer than this to a domain boundary are reported as tangent.
pub const TANGENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Default)]
pub struct Collapsed {
    pub pieces: Vec<Piece>,
    pub warnings: Vec<String>,
}

/// Replaces the commutator `[phi(.(t_axis)), phi(.(t_partner))]` in each
/// piece by its delta support: `t_axis` is pinned to `t_partner + dt` for
/// each locus `dt` of `support`, and the piece weight picks up the locus
/// weight. Loci falling outside the domain drop out.
pub fn collapse_delta(
    pieces: &[Piece],
    support: &CommutatorSupport,
    axis: usize,
    partner: usize,
) -> Collapsed {
    let mut out = Collapsed::default();
    for piece in pieces {
        for &(dt, w) in &support.loci {
            let mut domain: Domain = piece.domain.clone();
            let slack = domain.pin(axis, partner, dt);
            if slack.abs() <= TANGENCY_TOL * support.separation.max(1.0) {
                out.warnings.push(format!(
                    "lightcone locus dt = {dt} tangent to the integration domain (slack {slack:.2e})"
                ));
            }
            if domain.is_empty() {
                continue;
            }
            out.pieces.push(Piece {
                weight: piece.weight * w,
                domain,
            });
        }
    }
    out
}

/// Pieces with identical domains are merged by adding weights.
pub fn merge(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut merged: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let Some(q) = merged.iter_mut().find(|q| q.domain == p.domain) {
            q.weight += p.weight;
        } else {
            merged.push(p);
        }
    }
    merged.retain(|p| p.weight != Complex64::new(0.0, 0.0));
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlators::commutator_distributional;

    #[test]
    fn spacelike_window_collapses_to_nothing() {
        let sup = commutator_distributional(0.0, 1.0).unwrap();
        let base = vec![Piece::unit(Domain::simplex(2, 0.0, 0.8))];
        // [phi(x1(t2)), phi(x2(t1))]: axis t2 (index 1), partner t1.
        let c = collapse_delta(&base, &sup, 1, 0);
        assert!(c.pieces.is_empty());
        assert!(c.warnings.is_empty());
    }

    #[test]
    fn ordered_window_keeps_the_past_locus() {
        let sup = commutator_distributional(0.0, 1.0).unwrap();
        let base = vec![Piece::unit(Domain::simplex(2, 0.0, 3.0))];
        let c = collapse_delta(&base, &sup, 1, 0);
        assert_eq!(c.pieces.len(), 1);
        let w = c.pieces[0].weight;
        assert!((w - Complex64::new(0.0, 1.0 / (4.0 * std::f64::consts::PI))).norm() < 1e-15);
        assert_eq!(c.pieces[0].domain.bounds(0), (1.0, 3.0));
    }

    #[test]
    fn tangent_locus_is_flagged() {
        let sup = commutator_distributional(0.0, 1.0).unwrap();
        let base = vec![Piece::unit(Domain::simplex(2, 0.0, 1.0))];
        let c = collapse_delta(&base, &sup, 1, 0);
        assert!(!c.warnings.is_empty());
    }
}
