use std::collections::VecDeque;

use super::{CurveEndpoints, Network};

/// Signed unit flows on undirected edges: `flow[e] = 1` means `u → v`.
fn residual(flow: &[i8], e: usize, from_u: bool) -> bool {
    if from_u {
        flow[e] < 1
    } else {
        flow[e] > -1
    }
}

/// Edmonds–Karp on unit capacities. Returns the flow value, an edge-disjoint
/// path decomposition and the edges of a minimum cut.
pub(crate) fn edmonds_karp(
    net: &Network,
    sources: &[usize],
    targets: &[usize],
) -> (usize, Vec<Vec<u32>>, Vec<usize>) {
    let n = net.vertex_count();
    let mut is_source = vec![false; n];
    let mut is_target = vec![false; n];
    sources.iter().for_each(|&s| is_source[s] = true);
    targets.iter().for_each(|&t| is_target[t] = true);
    let mut flow = vec![0i8; net.edge_count()];
    let mut value = 0;
    loop {
        let mut pred: Vec<Option<(u32, u32)>> = vec![None; n];
        let mut seen = is_source.clone();
        let mut queue: VecDeque<usize> = sources.iter().copied().collect();
        let mut end = None;
        while let Some(u) = queue.pop_front() {
            if is_target[u] {
                end = Some(u);
                break;
            }
            for &(v, e) in net.incident(u) {
                let v = v as usize;
                let from_u = net.edges()[e as usize].0 as usize == u;
                if !seen[v] && residual(&flow, e as usize, from_u) {
                    seen[v] = true;
                    pred[v] = Some((u as u32, e));
                    queue.push_back(v);
                }
            }
        }
        let Some(mut cur) = end else {
            let cut = net
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, &(u, v))| seen[u as usize] != seen[v as usize])
                .map(|(i, _)| i)
                .collect();
            return (value, decompose(net, &flow, &is_source, &is_target), cut);
        };
        while let Some((u, e)) = pred[cur] {
            let e = e as usize;
            flow[e] += if net.edges()[e].0 == u { 1 } else { -1 };
            cur = u as usize;
        }
        value += 1;
    }
}

fn decompose(net: &Network, flow: &[i8], is_source: &[bool], is_target: &[bool]) -> Vec<Vec<u32>> {
    let mut flow = flow.to_vec();
    let out_edge = |flow: &[i8], u: usize| {
        net.incident(u).iter().find_map(|&(v, e)| {
            let (a, _) = net.edges()[e as usize];
            let f = flow[e as usize];
            let leaves = if a as usize == u { f == 1 } else { f == -1 };
            leaves.then_some((v, e))
        })
    };
    let mut paths = Vec::new();
    for s in (0..net.vertex_count()).filter(|&s| is_source[s]) {
        while out_edge(&flow, s).is_some() {
            let mut walk = vec![s as u32];
            let mut cur = s;
            while !is_target[cur] {
                let (v, e) = out_edge(&flow, cur).expect("flow is conserved");
                flow[e as usize] = 0;
                cur = v as usize;
                // drop a cycle if the walk returns to a vertex
                if let Some(pos) = walk.iter().position(|&x| x as usize == cur) {
                    walk.truncate(pos);
                }
                walk.push(cur as u32);
            }
            paths.push(walk);
        }
    }
    paths
}

/// Vertex sequences of a maximum family of edge-disjoint crossings.
pub fn max_flow_paths(net: &Network, ends: &CurveEndpoints) -> Vec<Vec<u32>> {
    edmonds_karp(net, &ends.sources, &ends.targets).1
}

struct Arc {
    to: usize,
    cap: i64,
}

/// Minimum number of edges separating the sources from the targets,
/// computed with Dinic's algorithm.
pub fn mincut_oracle(net: &Network, ends: &CurveEndpoints) -> usize {
    let n = net.vertex_count();
    let (s, t) = (n, n + 1);
    let mut arcs: Vec<Arc> = Vec::new();
    let mut adj = vec![Vec::new(); n + 2];
    let mut add = |a: usize, b: usize, ca: i64, cb: i64, arcs: &mut Vec<Arc>| {
        adj[a].push(arcs.len());
        arcs.push(Arc { to: b, cap: ca });
        adj[b].push(arcs.len());
        arcs.push(Arc { to: a, cap: cb });
    };
    let big = net.edge_count() as i64 + 1;
    for &(u, v) in net.edges() {
        add(u as usize, v as usize, 1, 1, &mut arcs);
    }
    for &x in &ends.sources {
        add(s, x, big, 0, &mut arcs);
    }
    for &x in &ends.targets {
        add(x, t, big, 0, &mut arcs);
    }
    let mut total = 0i64;
    loop {
        let mut level = vec![usize::MAX; n + 2];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &adj[u] {
                let v = arcs[a].to;
                if arcs[a].cap > 0 && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if level[t] == usize::MAX {
            return total as usize;
        }
        let mut next = vec![0usize; n + 2];
        loop {
            let pushed = blocking(s, t, big, &level, &mut next, &adj, &mut arcs);
            if pushed == 0 {
                break;
            }
            total += pushed;
        }
    }
}

fn blocking(
    u: usize,
    t: usize,
    limit: i64,
    level: &[usize],
    next: &mut [usize],
    adj: &[Vec<usize>],
    arcs: &mut [Arc],
) -> i64 {
    if u == t {
        return limit;
    }
    while next[u] < adj[u].len() {
        let a = adj[u][next[u]];
        let v = arcs[a].to;
        if arcs[a].cap > 0 && level[v] == level[u] + 1 {
            let got = blocking(v, t, limit.min(arcs[a].cap), level, next, adj, arcs);
            if got > 0 {
                arcs[a].cap -= got;
                arcs[a ^ 1].cap += got;
                return got;
            }
        }
        next[u] += 1;
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_and_parallel_cuts() {
        let net = Network::path(4);
        let e = CurveEndpoints::single(0, 4).unwrap();
        assert_eq!(mincut_oracle(&net, &e), 1);
        assert_eq!(edmonds_karp(&net, &[0], &[4]).0, 1);
        for m in 1..5 {
            let net = Network::parallel_paths(m, 3);
            let e = CurveEndpoints::single(0, 1).unwrap();
            assert_eq!(mincut_oracle(&net, &e), m);
            let (v, paths, cut) = edmonds_karp(&net, &[0], &[1]);
            assert_eq!((v, paths.len(), cut.len()), (m, m, m));
        }
    }

    #[test]
    fn grid_left_right_is_the_row_count() {
        let net = Network::grid(5, 4);
        let e = CurveEndpoints::grid_left_right(5, 4).unwrap();
        assert_eq!(mincut_oracle(&net, &e), 4);
        let paths = max_flow_paths(&net, &e);
        assert_eq!(paths.len(), 4);
        let mut used = std::collections::HashSet::new();
        for p in &paths {
            assert!(e.sources.contains(&(p[0] as usize)));
            assert!(e.targets.contains(&(*p.last().unwrap() as usize)));
            for w in p.windows(2) {
                assert!(used.insert((w[0].min(w[1]), w[0].max(w[1]))));
            }
        }
    }

    #[test]
    fn parallel_edges_count_separately() {
        let net = Network::path(3).doubled();
        assert_eq!(mincut_oracle(&net, &CurveEndpoints::single(0, 3).unwrap()), 2);
    }
}
