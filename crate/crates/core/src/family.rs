//! Subgraph families, network specifications and the constraint algebra
//! linking them to the degree and clustering targets.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// One member of a subgraph family.
///
/// `pattern` is the edge list of the subgraph over local roles `0..nodes`.
/// It is inferred for the five built-in shapes and required by the generator
/// for anything else.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubgraphKind {
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
    pub triangles: usize,
    pub degrees: Vec<usize>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub pattern: Option<Vec<[usize; 2]>>,
}

/// Shapes the generator and the census know how to handle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Shape {
    Triangle,
    Square,
    DiagSquare,
    K4,
    Pentagon,
}

impl Shape {
    pub const ALL: [Shape; 5] = [
        Shape::K4,
        Shape::Triangle,
        Shape::Square,
        Shape::Pentagon,
        Shape::DiagSquare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Triangle => "triangle",
            Shape::Square => "square",
            Shape::DiagSquare => "diag_square",
            Shape::K4 => "k4",
            Shape::Pentagon => "pentagon",
        }
    }

    pub fn pattern(self) -> Vec<[usize; 2]> {
        match self {
            Shape::Triangle => vec![[0, 1], [1, 2], [0, 2]],
            Shape::Square => vec![[0, 1], [1, 2], [2, 3], [0, 3]],
            // diagonal 0-2
            Shape::DiagSquare => vec![[0, 1], [1, 2], [2, 3], [0, 3], [0, 2]],
            Shape::K4 => vec![[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]],
            Shape::Pentagon => vec![[0, 1], [1, 2], [2, 3], [3, 4], [0, 4]],
        }
    }

    pub fn kind(self) -> SubgraphKind {
        SubgraphKind::from_pattern(self.name(), pattern_nodes(&self.pattern()), self.pattern())
            .expect("built-in shapes are valid")
    }

    fn matches(self, kind: &SubgraphKind) -> bool {
        let reference = self.kind();
        let mut a = kind.degrees.clone();
        let mut b = reference.degrees;
        a.sort_unstable();
        b.sort_unstable();
        kind.nodes == reference.nodes
            && kind.edges == reference.edges
            && kind.triangles == reference.triangles
            && a == b
    }
}

fn pattern_stats(name: &str, nodes: usize, pattern: &[[usize; 2]]) -> Result<(Vec<usize>, usize)> {
    let mut degrees = vec![0; nodes];
    let mut adj = vec![vec![false; nodes]; nodes];
    for &[u, v] in pattern {
        if u >= nodes || v >= nodes || u == v || adj[u][v] {
            return Err(Error::Family(format!("kind `{name}`: bad pattern edge {u}-{v}")));
        }
        adj[u][v] = true;
        adj[v][u] = true;
        degrees[u] += 1;
        degrees[v] += 1;
    }
    let mut triangles = 0;
    for a in 0..nodes {
        for b in a + 1..nodes {
            for c in b + 1..nodes {
                if adj[a][b] && adj[b][c] && adj[a][c] {
                    triangles += 1;
                }
            }
        }
    }
    Ok((degrees, triangles))
}

fn pattern_nodes(pattern: &[[usize; 2]]) -> usize {
    pattern.iter().flatten().max().map_or(0, |&m| m + 1)
}

impl SubgraphKind {
    /// Builds a kind from its counts. The edge pattern is inferred when the
    /// counts match one of the built-in shapes.
    pub fn new(
        name: &str,
        nodes: usize,
        edges: usize,
        triangles: usize,
        degrees: Vec<usize>,
    ) -> Result<Self> {
        SubgraphKind {
            name: name.to_string(),
            nodes,
            edges,
            triangles,
            degrees,
            pattern: None,
        }
        .normalized()
    }

    pub fn from_pattern(name: &str, nodes: usize, pattern: Vec<[usize; 2]>) -> Result<Self> {
        let (degrees, triangles) = pattern_stats(name, nodes, &pattern)?;
        let kind = SubgraphKind {
            name: name.to_string(),
            nodes,
            edges: pattern.len(),
            triangles,
            degrees,
            pattern: Some(pattern),
        };
        kind.validate()?;
        Ok(kind)
    }

    /// Validates the kind and fills in the pattern of a built-in shape.
    fn normalized(mut self) -> Result<Self> {
        self.validate()?;
        if self.pattern.is_none() {
            self.pattern = self.shape().map(|s| self.align_pattern(s.pattern()));
        }
        Ok(self)
    }

    // Built-in patterns list roles in their own order; permute roles so that
    // the pattern degrees line up with the declared degree list.
    fn align_pattern(&self, pattern: Vec<[usize; 2]>) -> Vec<[usize; 2]> {
        let mut pdeg = vec![0; self.nodes];
        for &[u, v] in &pattern {
            pdeg[u] += 1;
            pdeg[v] += 1;
        }
        let mut used = vec![false; self.nodes];
        let mut map = vec![0; self.nodes];
        for (role, &d) in self.degrees.iter().enumerate() {
            let src = (0..self.nodes)
                .find(|&i| !used[i] && pdeg[i] == d)
                .expect("degree multisets agree");
            used[src] = true;
            map[src] = role;
        }
        pattern.into_iter().map(|[u, v]| [map[u], map[v]]).collect()
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Family(format!("kind `{}`: {msg}", self.name)));
        if self.name.is_empty() {
            return bad("empty name");
        }
        if self.degrees.len() != self.nodes {
            return bad("degree list length differs from node count");
        }
        let sum: usize = self.degrees.iter().sum();
        if sum != 2 * self.edges {
            return bad("edge count is not half the degree sum");
        }
        if self.edges == 0 {
            return bad("a kind must have at least one edge");
        }
        if let Some(p) = &self.pattern {
            let (degrees, triangles) = pattern_stats(&self.name, self.nodes, p)?;
            if p.len() != self.edges || triangles != self.triangles || degrees != self.degrees {
                return bad("pattern disagrees with declared counts");
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> Option<Shape> {
        Shape::ALL.into_iter().find(|s| s.matches(self))
    }

    pub fn is_clustering(&self) -> bool {
        self.triangles > 0
    }
}

/// Ordered set of subgraph kinds; the coordinate system of a genotype.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgraphFamily {
    kinds: Vec<SubgraphKind>,
}

impl SubgraphFamily {
    pub fn new(kinds: Vec<SubgraphKind>) -> Result<Self> {
        if kinds.is_empty() {
            return Err(Error::Family("family is empty".into()));
        }
        let kinds = kinds
            .into_iter()
            .map(SubgraphKind::normalized)
            .collect::<Result<Vec<_>>>()?;
        for (i, k) in kinds.iter().enumerate() {
            if kinds[..i].iter().any(|o| o.name == k.name) {
                return Err(Error::Family(format!("duplicate kind name `{}`", k.name)));
            }
        }
        if !kinds.iter().any(SubgraphKind::is_clustering) {
            return Err(Error::Family(
                "family needs at least one clustering-inducing kind".into(),
            ));
        }
        Ok(SubgraphFamily { kinds })
    }

    /// K4, triangle, square, pentagon, diag-square.
    pub fn default_family() -> Self {
        Self::from_shapes(&Shape::ALL)
    }

    pub fn from_shapes(shapes: &[Shape]) -> Self {
        SubgraphFamily::new(shapes.iter().map(|s| s.kind()).collect()).expect("valid shapes")
    }

    pub fn kinds(&self) -> &[SubgraphKind] {
        &self.kinds
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.kinds.iter().position(|k| k.name == name)
    }

    pub fn edge_row(&self) -> Vec<i64> {
        self.kinds.iter().map(|k| k.edges as i64).collect()
    }

    pub fn triangle_row(&self) -> Vec<i64> {
        self.kinds.iter().map(|k| k.triangles as i64).collect()
    }

    pub fn edge_contribution(&self, counts: &[i64]) -> i64 {
        dot(&self.edge_row(), counts)
    }

    pub fn triangle_contribution(&self, counts: &[i64]) -> i64 {
        dot(&self.triangle_row(), counts)
    }

    /// Stable 64-bit FNV-1a digest of the family's canonical description.
    pub fn digest(&self) -> u64 {
        let mut text = String::new();
        for k in &self.kinds {
            text.push_str(&format!(
                "{}:{}:{}:{}:{:?};",
                k.name, k.nodes, k.edges, k.triangles, k.degrees
            ));
        }
        crate::seeding::fnv1a(text.as_bytes())
    }

    /// Builds a spec from `(kind name, count)` pairs; unnamed kinds are zero.
    pub fn spec_from_named(&self, context: Context, named: &[(&str, i64)]) -> Result<NetworkSpec> {
        let mut counts = vec![0; self.len()];
        for &(name, c) in named {
            let i = self
                .index_of(name)
                .ok_or_else(|| Error::Family(format!("no kind named `{name}`")))?;
            counts[i] = c;
        }
        Ok(NetworkSpec::new(counts, context))
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Size, uniform degree and target global clustering of the networks.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Context {
    pub nodes: usize,
    pub degree: usize,
    pub clustering: f64,
}

impl Context {
    pub fn new(nodes: usize, degree: usize, clustering: f64) -> Result<Self> {
        let ctx = Context {
            nodes,
            degree,
            clustering,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes == 0 {
            return Err(Error::Context("node count must be positive".into()));
        }
        if self.degree < 2 || self.degree >= self.nodes {
            return Err(Error::Context(format!(
                "degree {} must lie in [2, N-1]",
                self.degree
            )));
        }
        if (self.nodes * self.degree) % 2 == 1 {
            return Err(Error::Context("N*k must be even".into()));
        }
        if !(0.0..=1.0).contains(&self.clustering) {
            return Err(Error::Context(format!(
                "clustering {} outside [0, 1]",
                self.clustering
            )));
        }
        Ok(())
    }

    pub fn edge_budget(&self) -> i64 {
        (self.nodes * self.degree / 2) as i64
    }

    /// Connected triples of a k-regular graph: N·k(k−1)/2.
    pub fn triples(&self) -> i64 {
        (self.nodes * self.degree * (self.degree - 1) / 2) as i64
    }

    pub fn target_triangles(&self) -> i64 {
        target_triangles(self.nodes, self.degree, self.clustering)
    }

    /// Clustering implied by a triangle count in this context.
    pub fn clustering_of(&self, triangles: i64) -> f64 {
        3.0 * triangles as f64 / self.triples() as f64
    }
}

/// Triangles needed for global clustering `c` in an N-node k-regular graph,
/// rounded half up.
pub fn target_triangles(nodes: usize, degree: usize, c: f64) -> i64 {
    let triples = (nodes * degree * degree.saturating_sub(1)) as f64 / 2.0;
    libm::floor(c * triples / 3.0 + 0.5) as i64
}

/// Genotype: one count per family kind, plus the context it is judged in.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NetworkSpec {
    pub counts: Vec<i64>,
    pub context: Context,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Violation {
    Length { expected: usize, got: usize },
    NegativeCount { kind: usize, count: i64 },
    EdgeBudget { required: i64, budget: i64 },
    TriangleTarget { contribution: i64, target: i64 },
}

impl NetworkSpec {
    pub fn new(counts: Vec<i64>, context: Context) -> Self {
        NetworkSpec { counts, context }
    }

    pub fn edge_contribution(&self, family: &SubgraphFamily) -> i64 {
        family.edge_contribution(&self.counts)
    }

    pub fn triangle_contribution(&self, family: &SubgraphFamily) -> i64 {
        family.triangle_contribution(&self.counts)
    }

    /// Edges left for free placement; errors when the subgraphs alone
    /// exceed N·k/2.
    pub fn free_edge_budget(&self, family: &SubgraphFamily) -> Result<i64> {
        let free = self.context.edge_budget() - self.edge_contribution(family);
        if free < 0 {
            return Err(Error::OverBudget(-free));
        }
        Ok(free)
    }

    pub fn validate(&self, family: &SubgraphFamily) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.counts.len() != family.len() {
            out.push(Violation::Length {
                expected: family.len(),
                got: self.counts.len(),
            });
            return out;
        }
        for (kind, &count) in self.counts.iter().enumerate() {
            if count < 0 {
                out.push(Violation::NegativeCount { kind, count });
            }
        }
        let required = self.edge_contribution(family);
        let budget = self.context.edge_budget();
        if required > budget {
            out.push(Violation::EdgeBudget { required, budget });
        }
        let contribution = self.triangle_contribution(family);
        let target = self.context.target_triangles();
        if contribution != target {
            out.push(Violation::TriangleTarget {
                contribution,
                target,
            });
        }
        out
    }

    pub fn is_valid(&self, family: &SubgraphFamily) -> bool {
        self.validate(family).is_empty()
    }

    /// Per-dimension inclusive upper bound of the search box: the largest
    /// count of that kind that fits the edge budget on its own.
    pub fn count_ceiling(context: &Context, family: &SubgraphFamily) -> Vec<i64> {
        family
            .kinds()
            .iter()
            .map(|k| context.edge_budget() / k.edges as i64)
            .collect()
    }
}
