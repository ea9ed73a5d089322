use serde::Serialize;

use super::expr::Vars;
use super::FamilyEntry;
use crate::ansatz::ClosedFormSolution;
use crate::elliptic::{eval_jacobi, EllipticPoint, QuarterShift, Triple};
use crate::error::{Error, Result};
use crate::grid::Residual;
use crate::heun::{residual_elliptic, HeunParams};
use crate::jet::Jet;

/// A family entry instantiated numerically, with the eigenfunction obtained
/// from a seed solution through the entry's recipe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformedEigenfunction {
    pub entry: FamilyEntry,
    pub vars: Vars,
    pub branch: i8,
    pub heun: HeunParams,
    pub seed: ClosedFormSolution,
    exponents: [f64; 3],
    seed_exponents: [f64; 3],
}

fn strength_factor(tr: &Triple, [b, f, g]: [f64; 3]) -> Jet {
    tr.dn.powf(b) * tr.cn.powf(f) * tr.sn.powf(g)
}

impl TransformedEigenfunction {
    /// `seed` must be a solution (or degenerate partner) of the entry's seed
    /// equation; its energy selects the branch of a two-branch `4mq`.
    pub fn new(entry: &FamilyEntry, seed: &ClosedFormSolution) -> Result<Self> {
        let spec = &seed.spec;
        if spec.case != entry.seed.case() || spec.half != entry.seed.half() {
            return Err(Error::domain(format!(
                "{} does not instantiate seed {}",
                spec.label(),
                entry.seed
            )));
        }
        // the partner carries the original strengths, so read t from them
        let vars = FamilyEntry::vars(spec.n, spec.p, seed.gal.a + 0.5, spec.m.value());
        let e = seed.spectral.e;
        let branch = entry.branch_for(&vars, e).ok_or_else(|| {
            Error::Construction(format!(
                "{}: energy {e} matches no branch of {}",
                spec.label(),
                entry.energy
            ))
        })?;
        let heun = entry.heun.instantiate(&vars, branch)?;
        let ev = |x: &[super::Poly; 3]| [x[0].eval(&vars), x[1].eval(&vars), x[2].eval(&vars)];
        Ok(TransformedEigenfunction {
            exponents: ev(&entry.recipe.exponents),
            seed_exponents: ev(&entry.recipe.seed_exponents),
            entry: entry.clone(),
            vars,
            branch,
            heun,
            seed: seed.clone(),
        })
    }

    pub fn evaluate_at(&self, pt: &EllipticPoint) -> Jet {
        let tr = Triple::at(pt);
        let [b, f, g] = self.exponents;
        let [sb, sf, sg] = self.seed_exponents;
        match self.entry.recipe.shift {
            QuarterShift::None => self.seed.evaluate_at(pt) * strength_factor(&tr, [b - sb, f - sf, g - sg]),
            shift => {
                let moved = tr.shifted(shift, pt.m);
                strength_factor(&tr, self.exponents)
                    * strength_factor(&moved, [-sb, -sf, -sg])
                    * self.seed.eval_on_triple(&moved)
            }
        }
    }

    pub fn evaluate(&self, y: f64) -> Result<Jet> {
        Ok(self.evaluate_at(&eval_jacobi(y, self.seed.spec.m)?))
    }

    /// Residual of the elliptic Heun equation with the entry's parameters.
    pub fn residual(&self, y: f64, exclusion: f64) -> Result<Residual> {
        let pt = eval_jacobi(y, self.seed.spec.m)?;
        residual_elliptic(&self.heun, &pt, &self.evaluate_at(&pt), exclusion)
    }

    /// The same recipe applied to the seed's degenerate partner.
    pub fn partner(&self) -> Result<Self> {
        TransformedEigenfunction::new(&self.entry, &self.seed.degenerate_partner()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{construct, AnsatzSpec};
    use crate::elliptic::EllipticModulus;
    use crate::families::{expand_family, seed_families};

    #[test]
    fn every_eq16_entry_solves_its_equation() {
        let m = EllipticModulus::new(0.36).unwrap();
        let seed = &seed_families()[0];
        let fam = expand_family(seed).unwrap();
        let spec = AnsatzSpec::new(seed.seed.case(), seed.seed.half(), 2, 1, 0.37, m).unwrap();
        let (_, sols) = construct(&spec).unwrap();
        for e in &fam {
            let tf = TransformedEigenfunction::new(e, &sols[0]).unwrap();
            for y in [0.3, 0.8, 1.3] {
                let r = tf.residual(y, 1e-3).unwrap().relative();
                assert!(r < 1e-9, "{}: {r:e}", e.word);
            }
        }
    }

    #[test]
    fn wrong_seed_is_rejected() {
        let m = EllipticModulus::new(0.5).unwrap();
        let seed = &seed_families()[1];
        let spec = AnsatzSpec::new(
            seed_families()[0].seed.case(),
            seed_families()[0].seed.half(),
            1,
            0,
            0.3,
            m,
        )
        .unwrap();
        let (_, sols) = construct(&spec).unwrap();
        assert!(TransformedEigenfunction::new(seed, &sols[0]).is_err());
    }
}
