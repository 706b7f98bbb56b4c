//! 2SAT by strongly connected components of the implication graph.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Lit { var, positive: false }
    }

    pub fn negate(self) -> Self {
        Lit {
            var: self.var,
            positive: !self.positive,
        }
    }

    fn node(self) -> usize {
        2 * self.var + usize::from(!self.positive)
    }

    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }
}

/// Conjunction of clauses with at most two literals. An empty clause is false.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwoSatFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

impl TwoSatFormula {
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.eval(assignment)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoSatResult {
    Satisfiable(Vec<bool>),
    Unsat,
}

pub fn solve_2sat(f: &TwoSatFormula) -> TwoSatResult {
    let nodes = 2 * f.num_vars;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for c in &f.clauses {
        match c.as_slice() {
            [] => return TwoSatResult::Unsat,
            [a] => adj[a.negate().node()].push(a.node()),
            [a, b] => {
                adj[a.negate().node()].push(b.node());
                adj[b.negate().node()].push(a.node());
            }
            _ => panic!("clause with more than two literals"),
        }
    }
    let comp = tarjan(&adj);
    let mut assignment = Vec::with_capacity(f.num_vars);
    for v in 0..f.num_vars {
        let (p, n) = (comp[2 * v], comp[2 * v + 1]);
        if p == n {
            return TwoSatResult::Unsat;
        }
        // Tarjan numbers components in reverse topological order.
        assignment.push(p < n);
    }
    TwoSatResult::Satisfiable(assignment)
}

/// Iterative Tarjan; returns the component index of every node.
fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge == 0 {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(*edge) {
                *edge += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            // All edges done.
            call.pop();
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp[w] = ncomp;
                    if w == v {
                        break;
                    }
                }
                ncomp += 1;
            }
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
        }
    }
    comp
}
