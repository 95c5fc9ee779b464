use num_rational::BigRational;
use num_traits::{One, Zero};

use super::TileMeasure;
use crate::error::{Error, Result};
use crate::graph::ReplacementGraph;

#[derive(Clone, Debug, PartialEq)]
pub struct DoublingReport {
    /// Worst mass ratio over compared pairs; `None` if a tile has zero mass.
    pub ratio: Option<BigRational>,
    /// Tiles realizing the worst ratio, as `(level, index)` pairs.
    pub witness: Option<((u32, usize), (u32, usize))>,
    pub pairs_checked: u64,
}

impl DoublingReport {
    pub fn is_doubling(&self) -> bool {
        self.ratio.is_some()
    }
}

struct Worst {
    ratio: BigRational,
    witness: Option<((u32, usize), (u32, usize))>,
    pairs: u64,
}

impl Worst {
    fn offer(&mut self, a: (u32, usize, &BigRational), b: (u32, usize, &BigRational)) {
        self.pairs += 1;
        let r = if a.2 >= b.2 { a.2 / b.2 } else { b.2 / a.2 };
        if r > self.ratio {
            self.ratio = r;
            self.witness = Some(((a.0, a.1), (b.0, b.1)));
        }
    }
}

/// Worst mass ratio over adjacent tiles of level `n`, adjacent tiles of
/// level `n-1`, and each tile against its parent and the parent's neighbours.
pub fn tile_doubling_check(m: &TileMeasure, g: &ReplacementGraph) -> Result<DoublingReport> {
    if m.level() != g.level() || m.alphabet() != g.alphabet() {
        return Err(Error::domain(format!(
            "measure is {} level {}, graph is {} level {}",
            m.alphabet().name(),
            m.level(),
            g.alphabet().name(),
            g.level()
        )));
    }
    let n = m.level();
    if let Some(i) = m.masses().iter().position(|x| x.is_zero()) {
        return Ok(DoublingReport {
            ratio: None,
            witness: Some(((n, i), (n, i))),
            pairs_checked: 0,
        });
    }
    let mut worst = Worst {
        ratio: BigRational::one(),
        witness: None,
        pairs: 0,
    };
    for e in g.edges() {
        let (u, v) = (e.u as usize, e.v as usize);
        worst.offer((n, u, m.mass(u)), (n, v, m.mass(v)));
    }
    if n > 0 {
        let coarse = m.coarsen()?;
        let cg = ReplacementGraph::build_with(n - 1, g.alphabet(), g.policy())?;
        for e in cg.edges() {
            let (u, v) = (e.u as usize, e.v as usize);
            worst.offer((n - 1, u, coarse.mass(u)), (n - 1, v, coarse.mass(v)));
        }
        let size = m.alphabet().size();
        for u in 0..m.len() {
            let p = u / size;
            worst.offer((n, u, m.mass(u)), (n - 1, p, coarse.mass(p)));
            for &(q, _) in cg.neighbors(p) {
                let q = q as usize;
                worst.offer((n, u, m.mass(u)), (n - 1, q, coarse.mass(q)));
            }
        }
    }
    Ok(DoublingReport {
        ratio: Some(worst.ratio),
        witness: worst.witness,
        pairs_checked: worst.pairs,
    })
}
