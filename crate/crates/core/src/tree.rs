//! Optimal cut systems on trees with 0/1 ignition probabilities.
//!
//! For every vertex `v` (in post-order) and every budget `b`, Table A holds
//! the best saved value inside the subtree of `v` when `v` burns (`f⁺`) and
//! when it does not (`f⁻`), together with cut systems achieving them. Table
//! ST folds the children of `v` in one at a time.

use std::cmp::Ordering;
use std::ops::Add;

use thiserror::Error;

use crate::graph::{CutSystem, EdgeId, GraphError, MixedGraph, VertexId};
use crate::instance::{Instance, Solution};
use crate::numeric::Scalar;
use crate::risk::windy_risk;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("not a tree: {0}")]
    NotTree(String),
    #[error("edge {0} is directed without an opposite edge; tree instances must be undirected")]
    LoneDirected(usize),
    #[error("vertex {0} has ignition probability {1}; tree instances need 0 or 1")]
    NonBinaryIgnition(usize, String),
    #[error("edge {0} has non-integral cost {1}")]
    NonIntegerCost(usize, String),
    #[error("budget {0} is not a non-negative integer")]
    NonIntegerBudget(String),
    #[error("root {0} is not a vertex")]
    InvalidRoot(usize),
}

/// Saved value, with a sentinel for infeasible states.
#[derive(Debug, Clone, PartialEq)]
pub enum Score<T> {
    NegInf,
    Finite(T),
}

impl<T: Scalar> Score<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Score::Finite(_))
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Score::Finite(t) => Some(t),
            Score::NegInf => None,
        }
    }
}

impl<T: Scalar> Add for &Score<T> {
    type Output = Score<T>;

    fn add(self, rhs: &Score<T>) -> Score<T> {
        match (self, rhs) {
            (Score::Finite(a), Score::Finite(b)) => Score::Finite(a.clone() + b.clone()),
            _ => Score::NegInf,
        }
    }
}

impl<T: Scalar> PartialOrd for Score<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Score::NegInf, Score::NegInf) => Some(Ordering::Equal),
            (Score::NegInf, Score::Finite(_)) => Some(Ordering::Less),
            (Score::Finite(_), Score::NegInf) => Some(Ordering::Greater),
            (Score::Finite(a), Score::Finite(b)) => a.partial_cmp(b),
        }
    }
}

/// A tree rooted at `root`, with vertices renumbered in post-order.
#[derive(Debug, Clone)]
pub struct TreeInstance<T> {
    /// `order[i]` is the original id of the vertex numbered `i`.
    pub order: Vec<VertexId>,
    /// Children of each post-order vertex, in post-order numbers.
    pub children: Vec<Vec<usize>>,
    /// Edges linking each post-order vertex to its parent (empty for the root).
    pub parent_link: Vec<[Option<EdgeId>; 2]>,
    pub burning: Vec<bool>,
    pub value: Vec<T>,
    /// Cost of the edge to the parent.
    pub cost: Vec<usize>,
    pub budget: usize,
}

impl<T: Scalar> TreeInstance<T> {
    /// Roots the tree at the last vertex.
    pub fn from_instance(inst: &Instance<T>) -> Result<Self, TreeError> {
        let n = inst.graph.vertex_count();
        Self::with_root(inst, VertexId(n.saturating_sub(1)))
    }

    pub fn with_root(inst: &Instance<T>, root: VertexId) -> Result<Self, TreeError> {
        let g = &inst.graph;
        let n = g.vertex_count();
        if n == 0 {
            return Err(TreeError::NotTree("no vertices".into()));
        }
        if root.0 >= n {
            return Err(TreeError::InvalidRoot(root.0));
        }
        g.ensure_windy()?;
        let budget =
            inst.budget.to_u64_exact().ok_or_else(|| TreeError::NonIntegerBudget(inst.budget.to_string()))? as usize;

        let mut burning = vec![false; n];
        for (i, v) in g.vertices().iter().enumerate() {
            if v.ignition.is_one() {
                burning[i] = true;
            } else if !v.ignition.is_zero() {
                return Err(TreeError::NonBinaryIgnition(i, v.ignition.to_string()));
            }
        }

        // One entry per link: its first edge, the opposite edge if any, and the cost.
        let mut links: Vec<(EdgeId, Option<EdgeId>, usize)> = Vec::with_capacity(n);
        for (i, e) in g.edges().iter().enumerate() {
            if matches!(e.pair, Some(p) if p.0 < i) {
                continue;
            }
            if e.is_directed() && e.pair.is_none() {
                return Err(TreeError::LoneDirected(i));
            }
            let c = e.cost.to_u64_exact().ok_or_else(|| TreeError::NonIntegerCost(i, e.cost.to_string()))?;
            links.push((EdgeId(i), e.pair, c as usize));
        }
        if links.len() + 1 != n {
            return Err(TreeError::NotTree(format!("{} vertices but {} links", n, links.len())));
        }

        // Flat adjacency: neighbours of `v` are `adj[start[v]..start[v + 1]]`.
        let mut start = vec![0usize; n + 1];
        for &(e, _, _) in &links {
            let e = g.edge(e);
            start[e.tail.0 + 1] += 1;
            start[e.head.0 + 1] += 1;
        }
        for v in 0..n {
            start[v + 1] += start[v];
        }
        let mut fill = start.clone();
        let mut adj = vec![(0usize, 0usize); 2 * links.len()];
        for (li, &(e, _, _)) in links.iter().enumerate() {
            let e = g.edge(e);
            adj[fill[e.tail.0]] = (e.head.0, li);
            fill[e.tail.0] += 1;
            adj[fill[e.head.0]] = (e.tail.0, li);
            fill[e.head.0] += 1;
        }
        for v in 0..n {
            adj[start[v]..start[v + 1]].sort_unstable();
        }

        // Iterative DFS producing a post-order with children by ascending id.
        let mut post_of = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut parent_link_orig: Vec<Option<usize>> = vec![None; n];
        let mut visited = vec![false; n];
        let mut stack = vec![(root.0, start[root.0])];
        visited[root.0] = true;
        while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
            if *pos < start[v + 1] {
                let (w, li) = adj[*pos];
                *pos += 1;
                if visited[w] {
                    if parent_link_orig[v] != Some(li) {
                        return Err(TreeError::NotTree("contains a cycle".into()));
                    }
                    continue;
                }
                visited[w] = true;
                parent_link_orig[w] = Some(li);
                stack.push((w, start[w]));
            } else {
                post_of[v] = order.len();
                order.push(VertexId(v));
                stack.pop();
            }
        }
        if order.len() != n {
            return Err(TreeError::NotTree("not connected".into()));
        }

        // Siblings are visited by ascending id, so pushing in post-order keeps
        // each child list sorted both ways.
        let mut children = vec![Vec::new(); n];
        let mut parent_link = vec![[None; 2]; n];
        let mut cost = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            if let Some(li) = parent_link_orig[v.0] {
                let (e0, pair, c) = links[li];
                let e = g.edge(e0);
                let parent = if e.tail == v { e.head } else { e.tail };
                children[post_of[parent.0]].push(i);
                parent_link[i] = [Some(e0), pair];
                cost[i] = c;
            }
        }

        Ok(TreeInstance {
            burning: order.iter().map(|v| burning[v.0]).collect(),
            value: order.iter().map(|v| g.vertex(*v).value.clone()).collect(),
            order,
            children,
            parent_link,
            cost,
            budget,
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn root(&self) -> usize {
        self.order.len() - 1
    }

    /// Budget columns actually needed: spending beyond Σκ buys nothing.
    pub fn effective_budget(&self) -> usize {
        self.budget.min(self.cost.iter().sum())
    }
}

/// Reference into the cut-system arena; `0` is the empty system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutRef(u32);

impl CutRef {
    pub const EMPTY: CutRef = CutRef(0);
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Empty,
    /// The edge between this post-order vertex and its parent.
    Leaf(u32),
    Join(CutRef, CutRef),
}

/// Persistent cut systems shared between DP cells.
#[derive(Debug, Default)]
pub struct CutArena {
    nodes: Vec<Node>,
}

impl CutArena {
    fn with_capacity(n: usize) -> Self {
        let mut nodes = Vec::with_capacity(n.min(1 << 24));
        nodes.push(Node::Empty);
        CutArena { nodes }
    }

    fn push(&mut self, node: Node) -> CutRef {
        self.nodes.push(node);
        CutRef(u32::try_from(self.nodes.len() - 1).expect("cut arena overflow"))
    }

    fn join(&mut self, a: CutRef, b: CutRef) -> CutRef {
        match (a, b) {
            (CutRef::EMPTY, x) | (x, CutRef::EMPTY) => x,
            _ => self.push(Node::Join(a, b)),
        }
    }

    fn join_with_cut(&mut self, a: CutRef, b: CutRef, child: usize) -> CutRef {
        let leaf = self.push(Node::Leaf(child as u32));
        let ab = self.join(a, b);
        self.join(ab, leaf)
    }

    /// Post-order vertices whose parent edge is cut, ascending.
    pub fn cut_children(&self, r: CutRef) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![r];
        while let Some(r) = stack.pop() {
            match self.nodes[r.0 as usize] {
                Node::Empty => {}
                Node::Leaf(v) => out.push(v as usize),
                Node::Join(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpCell<T> {
    pub f_plus: Score<T>,
    pub f_minus: Score<T>,
    pub h_plus: CutRef,
    pub h_minus: CutRef,
}

impl<T> DpCell<T> {
    fn plus(&self) -> &Score<T> {
        &self.f_plus
    }

    fn minus(&self) -> &Score<T> {
        &self.f_minus
    }
}

#[derive(Clone, Copy)]
enum Branch {
    /// Both burn, no cut.
    BurnBurn,
    /// Root burns, child saved by cutting.
    BurnSafe,
    /// Root saved, burning child cut off.
    SafeBurn,
    /// Neither burns, no cut.
    SafeSafe,
}

/// Best `left[x] + right(total - x)` over `x`, smallest `x` on ties.
#[inline]
fn best_split<T: Scalar, P>(left: &[Score<T>], right: &[DpCell<T>], pick: P, total: usize) -> (Score<T>, usize)
where
    P: Fn(&DpCell<T>) -> &Score<T>,
{
    let mut best = Score::NegInf;
    let mut arg = 0;
    for (x, l) in left[..=total].iter().enumerate() {
        let s = l + pick(&right[total - x]);
        if s > best {
            best = s;
            arg = x;
        }
    }
    (best, arg)
}

/// Row `k` of Table ST for vertex `v`: the combination of `v` with all its
/// children, whose Table A rows are given in child order.
pub fn table_st<T: Scalar>(
    inst: &TreeInstance<T>,
    arena: &mut CutArena,
    v: usize,
    child_rows: &[&[DpCell<T>]],
    width: usize,
) -> Vec<DpCell<T>> {
    let mut ws = Workspace::new(width);
    let mut out = Vec::new();
    ws.combine(inst, arena, v, |i| child_rows[i], width, &mut out);
    out
}

/// Scratch rows reused across vertices.
struct Workspace<T> {
    plus: Vec<Score<T>>,
    minus: Vec<Score<T>>,
    h_plus: Vec<CutRef>,
    h_minus: Vec<CutRef>,
    next_plus: Vec<Score<T>>,
    next_minus: Vec<Score<T>>,
    next_h_plus: Vec<CutRef>,
    next_h_minus: Vec<CutRef>,
}

impl<T: Scalar> Workspace<T> {
    fn new(width: usize) -> Self {
        Workspace {
            plus: Vec::with_capacity(width + 1),
            minus: Vec::with_capacity(width + 1),
            h_plus: Vec::with_capacity(width + 1),
            h_minus: Vec::with_capacity(width + 1),
            next_plus: Vec::with_capacity(width + 1),
            next_minus: Vec::with_capacity(width + 1),
            next_h_plus: Vec::with_capacity(width + 1),
            next_h_minus: Vec::with_capacity(width + 1),
        }
    }

    /// Fills `out` with the row of `v`; `child_row(i)` is the row of the
    /// `i`-th child.
    fn combine<'r>(
        &mut self,
        inst: &TreeInstance<T>,
        arena: &mut CutArena,
        v: usize,
        child_row: impl Fn(usize) -> &'r [DpCell<T>],
        width: usize,
        out: &mut Vec<DpCell<T>>,
    ) where
        T: 'r,
    {
        let f_minus0 = if inst.burning[v] { Score::NegInf } else { Score::Finite(inst.value[v].clone()) };
        let f_plus = DpCell::<T>::plus;
        let f_minus = DpCell::<T>::minus;
        let ws = self;
        ws.plus.clear();
        ws.plus.resize(width + 1, Score::Finite(T::zero()));
        ws.minus.clear();
        ws.minus.resize(width + 1, f_minus0);
        ws.h_plus.clear();
        ws.h_plus.resize(width + 1, CutRef::EMPTY);
        ws.h_minus.clear();
        ws.h_minus.resize(width + 1, CutRef::EMPTY);

        for (i, &child) in inst.children[v].iter().enumerate() {
            let row = child_row(i);
            let c = inst.cost[child];
            ws.next_plus.clear();
            ws.next_minus.clear();
            ws.next_h_plus.clear();
            ws.next_h_minus.clear();
            for b in 0..=width {
                let (mut fp, x) = best_split(&ws.plus, row, f_plus, b);
                let mut choice_p = (Branch::BurnBurn, x);
                if b >= c {
                    let (m, x) = best_split(&ws.plus, row, f_minus, b - c);
                    // The cut is only taken when strictly better than no cut.
                    if m > fp {
                        fp = m;
                        choice_p = (Branch::BurnSafe, x);
                    }
                }

                let mut fm = Score::NegInf;
                let mut choice_m = None;
                if !inst.burning[v] {
                    if b >= c {
                        let (m, x) = best_split(&ws.minus, row, f_plus, b - c);
                        if m.is_finite() {
                            fm = m;
                            choice_m = Some((Branch::SafeBurn, x));
                        }
                    }
                    let (m, x) = best_split(&ws.minus, row, f_minus, b);
                    if m.is_finite() && m >= fm {
                        fm = m;
                        choice_m = Some((Branch::SafeSafe, x));
                    }
                }

                ws.next_h_plus.push(build(arena, choice_p, b, c, child, &ws.h_plus, &ws.h_minus, row));
                ws.next_h_minus.push(match choice_m {
                    Some(ch) => build(arena, ch, b, c, child, &ws.h_plus, &ws.h_minus, row),
                    None => CutRef::EMPTY,
                });
                ws.next_plus.push(fp);
                ws.next_minus.push(fm);
            }
            std::mem::swap(&mut ws.plus, &mut ws.next_plus);
            std::mem::swap(&mut ws.minus, &mut ws.next_minus);
            std::mem::swap(&mut ws.h_plus, &mut ws.next_h_plus);
            std::mem::swap(&mut ws.h_minus, &mut ws.next_h_minus);
        }

        out.clear();
        out.extend(
            ws.plus
                .drain(..)
                .zip(ws.minus.drain(..))
                .zip(ws.h_plus.iter().zip(&ws.h_minus))
                .map(|((f_plus, f_minus), (&h_plus, &h_minus))| DpCell { f_plus, f_minus, h_plus, h_minus }),
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn build<T>(
    arena: &mut CutArena,
    (branch, x): (Branch, usize),
    b: usize,
    c: usize,
    child: usize,
    st_plus: &[CutRef],
    st_minus: &[CutRef],
    a: &[DpCell<T>],
) -> CutRef {
    match branch {
        Branch::BurnBurn => arena.join(st_plus[x], a[b - x].h_plus),
        Branch::BurnSafe => arena.join_with_cut(st_plus[x], a[b - c - x].h_minus, child),
        Branch::SafeBurn => arena.join_with_cut(st_minus[x], a[b - c - x].h_plus, child),
        Branch::SafeSafe => arena.join(st_minus[x], a[b - x].h_minus),
    }
}

/// The full Table A, kept for inspection.
pub struct TableA<T> {
    pub rows: Vec<Vec<DpCell<T>>>,
    pub arena: CutArena,
}

impl<T: Scalar> TableA<T> {
    pub fn cut_children(&self, r: CutRef) -> Vec<usize> {
        self.arena.cut_children(r)
    }
}

fn run_dp<T: Scalar>(inst: &TreeInstance<T>, keep_rows: bool) -> (Vec<Option<Vec<DpCell<T>>>>, CutArena) {
    let width = inst.effective_budget();
    let n = inst.len();
    let mut arena = CutArena::with_capacity(4 * n * (width + 1));
    let mut rows: Vec<Option<Vec<DpCell<T>>>> = (0..n).map(|_| None).collect();
    let mut ws = Workspace::new(width);
    let mut spare: Vec<Vec<DpCell<T>>> = Vec::new();
    for v in 0..n {
        let mut row = spare.pop().unwrap_or_else(|| Vec::with_capacity(width + 1));
        {
            let kids = &inst.children[v];
            let rows = &rows;
            ws.combine(
                inst,
                &mut arena,
                v,
                |i| rows[kids[i]].as_deref().expect("children precede parents in post-order"),
                width,
                &mut row,
            );
        }
        if !keep_rows {
            for &c in &inst.children[v] {
                spare.extend(rows[c].take());
            }
        }
        rows[v] = Some(row);
    }
    (rows, arena)
}

pub fn table_a<T: Scalar>(inst: &TreeInstance<T>) -> TableA<T> {
    let (rows, arena) = run_dp(inst, true);
    TableA { rows: rows.into_iter().map(|r| r.expect("every row filled")).collect(), arena }
}

/// Optimal saved value and a cut system achieving it.
pub fn solve_tree_instance<T: Scalar>(tree: &TreeInstance<T>) -> (T, Vec<EdgeId>) {
    let (mut rows, arena) = run_dp(tree, false);
    let root_row = rows[tree.root()].take().expect("root row");
    let cell = &root_row[tree.effective_budget()];
    // Prefer the burning-root system unless the other is strictly better.
    let (saved, h) = if cell.f_minus > cell.f_plus {
        (cell.f_minus.finite().cloned(), cell.h_minus)
    } else {
        (cell.f_plus.finite().cloned(), cell.h_plus)
    };
    let mut edges: Vec<EdgeId> =
        arena.cut_children(h).into_iter().flat_map(|c| tree.parent_link[c].into_iter().flatten()).collect();
    edges.sort_unstable();
    (saved.expect("f⁺ is always finite"), edges)
}

pub fn solve_tree<T: Scalar>(inst: &Instance<T>) -> Result<Solution<T>, TreeError> {
    let tree = TreeInstance::from_instance(inst)?;
    Ok(solution_from(inst, &tree))
}

pub fn solve_tree_rooted<T: Scalar>(inst: &Instance<T>, root: VertexId) -> Result<Solution<T>, TreeError> {
    let tree = TreeInstance::with_root(inst, root)?;
    Ok(solution_from(inst, &tree))
}

fn solution_from<T: Scalar>(inst: &Instance<T>, tree: &TreeInstance<T>) -> Solution<T> {
    let (saved, edges) = solve_tree_instance(tree);
    let cut = CutSystem::from_edges(edges);
    let g = &inst.graph;
    Solution { cost: g.cut_cost(&cut), risk: g.total_value_all() - saved.clone(), saved, cut }
}

/// Re-evaluates `sol` against `inst` through the windy risk engine.
pub fn verify_solution<T: Scalar>(inst: &Instance<T>, sol: &Solution<T>) -> bool {
    let g: &MixedGraph<T> = &inst.graph;
    if sol.cut.iter().any(|e| e.0 >= g.edge_count()) || !g.is_closed(&sol.cut) {
        return false;
    }
    if g.cut_cost(&sol.cut) > inst.budget {
        return false;
    }
    let Ok(cut_graph) = g.remove_cut(&sol.cut) else {
        return false;
    };
    match windy_risk(&cut_graph) {
        Ok(r) => r.value + sol.saved.clone() == g.total_value_all(),
        Err(_) => false,
    }
}
