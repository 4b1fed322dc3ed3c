//! Combinatorial kernels behind nonrepresentability: class sizes of
//! mutually orthogonal equivalence systems, and 1-factorisations of `K_n`.

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::{AffinePlane, BinaryRelation, LyndonRelations, PrimeField};
use crate::partitions::walecki_coloring;
use crate::report::{CheckRecord, CheckReport};

fn hypothesis(which: &str, witness: impl std::fmt::Debug) -> Error {
    Error::HypothesisFailed {
        which: which.into(),
        witness: format!("{witness:?}"),
    }
}

/// Checks the hypotheses on `S_0, …, S_q` over `Z = {0, …, n−1}` and reports
/// the sizes of the classes of `S_0`, which must all equal `q`.
pub fn lemma_x_check(rels: &[BinaryRelation]) -> Result<CheckReport> {
    let Some(first) = rels.first() else {
        return Err(hypothesis("count", "no relations"));
    };
    let n = first.size();
    let q = rels.len() - 1;
    if q == 0 {
        return Err(hypothesis("count", "q must be nonzero"));
    }
    let id = BinaryRelation::identity(n);
    let full = BinaryRelation::full(n);
    for (i, s) in rels.iter().enumerate() {
        if s.size() != n {
            return Err(hypothesis("same_base", (i, s.size())));
        }
        if let Some(u) = (0..n).find(|&u| !s.contains(u, u)) {
            return Err(hypothesis("equivalence", (i, "reflexive", u)));
        }
        if let Some(pair) = s.pairs().find(|&(u, v)| !s.contains(v, u)) {
            return Err(hypothesis("equivalence", (i, "symmetric", pair)));
        }
        if let Some(w) = s.transitivity_witness() {
            return Err(hypothesis("equivalence", (i, "transitive", w)));
        }
        if *s == id || *s == full {
            return Err(hypothesis("nontrivial", i));
        }
    }
    let union = rels
        .iter()
        .fold(BinaryRelation::empty(n), |acc, s| acc.union(s));
    if let Some(pair) = full.difference(&union).pairs().next() {
        return Err(hypothesis("union", pair));
    }
    for i in 0..rels.len() {
        for j in 0..rels.len() {
            if i == j {
                continue;
            }
            if i < j {
                if let Some(pair) = rels[i]
                    .intersection(&rels[j])
                    .difference(&id)
                    .pairs()
                    .next()
                {
                    return Err(hypothesis("intersection", (i, j, pair)));
                }
            }
            if let Some(pair) = full.difference(&rels[i].then(&rels[j])).pairs().next() {
                return Err(hypothesis("composition", (i, j, pair)));
            }
        }
    }

    let sizes: Vec<usize> = first.classes().iter().map(Vec::len).collect();
    let wrong = sizes.iter().position(|&s| s != q);
    let mut report = CheckReport::new("lemma_x").param("n", n).param("q", q);
    let mut rec = CheckRecord::new("class_size_is_q", wrong.is_none())
        .with_detail(json!({"class_sizes": sizes}));
    if let Some(c) = wrong {
        rec = rec.with_witness(json!({"class": c, "size": sizes[c]}));
    }
    report.push(rec);
    Ok(report.finalize())
}

/// The equivalence system `E_i = R_i ∪ Id` of `AG(2,p)`.
pub fn plane_system(p: u64) -> Result<Vec<BinaryRelation>> {
    let plane = AffinePlane::new(PrimeField::new(p)?);
    Ok(LyndonRelations::from_plane(&plane).equivalences())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum YSearch {
    /// Colour classes, each a list of unordered pairs `u < v`.
    Exists {
        classes: Vec<Vec<(usize, usize)>>,
        nodes: usize,
    },
    None {
        nodes: usize,
    },
}

impl YSearch {
    pub fn exists(&self) -> bool {
        matches!(self, YSearch::Exists { .. })
    }

    pub fn nodes(&self) -> usize {
        match self {
            YSearch::Exists { nodes, .. } | YSearch::None { nodes } => *nodes,
        }
    }
}

/// Searches for `n − 1` disjoint symmetric irreflexive relations with domain
/// `Z = {0, …, n−1}` whose union is `Z × Z − Id`.
///
/// Such a family is a proper `(n−1)`-edge-colouring of `K_n`: every vertex
/// meets `n − 1` edges and every colour, so each colour appears exactly once
/// there. Edges at vertex 0 are pre-coloured `(0, j) ↦ j − 1`.
pub fn lemma_y_search(n: usize, budget: usize) -> Result<YSearch> {
    if !(2..=7).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "search is limited to 2 ≤ n ≤ 7, got {n}"
        )));
    }
    let colours = n - 1;
    let mut edges = Vec::new();
    for u in 1..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    // used[v] is a bitmask of colours present at v
    let mut used = vec![0u32; n];
    let mut colour = vec![vec![usize::MAX; n]; n];
    for j in 1..n {
        used[0] |= 1 << (j - 1);
        used[j] |= 1 << (j - 1);
        colour[0][j] = j - 1;
        colour[j][0] = j - 1;
    }
    let mut nodes = 0;
    let found = colour_edges(
        &edges,
        0,
        colours,
        &mut used,
        &mut colour,
        &mut nodes,
        budget,
    )?;
    Ok(if found {
        let mut classes = vec![Vec::new(); colours];
        for u in 0..n {
            for v in u + 1..n {
                classes[colour[u][v]].push((u, v));
            }
        }
        YSearch::Exists { classes, nodes }
    } else {
        YSearch::None { nodes }
    })
}

fn colour_edges(
    edges: &[(usize, usize)],
    next: usize,
    colours: usize,
    used: &mut [u32],
    colour: &mut [Vec<usize>],
    nodes: &mut usize,
    budget: usize,
) -> Result<bool> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::BudgetExceeded {
            what: "edge-colouring search nodes".into(),
            limit: budget,
        });
    }
    let Some(&(u, v)) = edges.get(next) else {
        return Ok(true);
    };
    for c in 0..colours {
        let bit = 1 << c;
        if (used[u] | used[v]) & bit != 0 {
            continue;
        }
        used[u] |= bit;
        used[v] |= bit;
        colour[u][v] = c;
        colour[v][u] = c;
        if colour_edges(edges, next + 1, colours, used, colour, nodes, budget)? {
            return Ok(true);
        }
        used[u] &= !bit;
        used[v] &= !bit;
    }
    Ok(false)
}

/// Checks that the classes are disjoint, symmetric, irreflexive relations
/// with domain `{0, …, n−1}` whose union is the diversity relation.
pub fn verify_factorisation(n: usize, classes: &[Vec<(usize, usize)>]) -> CheckReport {
    let rels: Vec<BinaryRelation> = classes
        .iter()
        .map(|c| BinaryRelation::from_pairs(n, c.iter().flat_map(|&(u, v)| [(u, v), (v, u)])))
        .collect();
    let mut report = CheckReport::new("factorisation")
        .param("n", n)
        .param("classes", classes.len());
    report.push(CheckRecord::new("class_count", classes.len() + 1 == n));

    let reflexive = rels.iter().position(|r| !r.is_irreflexive());
    let mut rec = CheckRecord::new("irreflexive", reflexive.is_none());
    if let Some(i) = reflexive {
        rec = rec.with_witness(json!({"class": i}));
    }
    report.push(rec);

    let mut overlap = None;
    let mut sizes = 0;
    for (i, r) in rels.iter().enumerate() {
        sizes += r.len();
        for (j, s) in rels.iter().enumerate().skip(i + 1) {
            if let Some(pair) = r.intersection(s).pairs().next() {
                overlap.get_or_insert((i, j, pair));
            }
        }
    }
    let mut rec = CheckRecord::new("disjoint", overlap.is_none());
    if let Some(w) = overlap {
        rec = rec.with_witness(w);
    }
    report.push(rec);

    let union = rels
        .iter()
        .fold(BinaryRelation::empty(n), |acc, r| acc.union(r));
    let diversity = BinaryRelation::full(n).difference(&BinaryRelation::identity(n));
    let missing = diversity.difference(&union).pairs().next();
    let mut rec = CheckRecord::new(
        "covers_diversity",
        missing.is_none() && sizes == diversity.len(),
    );
    if let Some(w) = missing {
        rec = rec.with_witness(w);
    }
    report.push(rec);

    let short = rels
        .iter()
        .enumerate()
        .find_map(|(i, r)| (0..n).find(|&u| !r.domain().contains(u)).map(|u| (i, u)));
    let mut rec = CheckRecord::new("full_domain", short.is_none());
    if let Some(w) = short {
        rec = rec.with_witness(w);
    }
    report.push(rec);
    report.finalize()
}

/// The Walecki colouring of `K_m`, checked as a 1-factorisation.
pub fn walecki_report(m: usize) -> Result<CheckReport> {
    let classes = walecki_coloring(m)?;
    let mut report = verify_factorisation(m, &classes);
    report.command = "walecki".into();
    Ok(report)
}
