use std::collections::BTreeSet;

use crate::model::Instance;

/// Undirected thread graph: an edge joins two threads that share a channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    pub nodes: Vec<usize>,
    /// Unordered pairs stored as (low, high), sorted.
    pub edges: Vec<(usize, usize)>,
    pub acyclic: bool,
    /// Channels used by exactly one thread.
    pub private_channels: Vec<usize>,
}

pub fn communication_topology(inst: &Instance) -> Topology {
    let mut edges = BTreeSet::new();
    let mut private_channels = Vec::new();
    for (ch, threads) in inst.channel_threads().iter().enumerate() {
        if threads.len() == 1 {
            private_channels.push(ch);
        }
        for (i, &a) in threads.iter().enumerate() {
            for &b in &threads[i + 1..] {
                edges.insert((a, b));
            }
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();

    let mut parent: Vec<usize> = (0..inst.t()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut acyclic = true;
    for &(a, b) in &edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            acyclic = false;
            break;
        }
        parent[ra] = rb;
    }

    Topology {
        nodes: (0..inst.t()).collect(),
        edges,
        acyclic,
        private_channels,
    }
}
