//! Measures the rotation digraph construction on random complete instances:
//! operation counts and wall time per instance.

use std::io::{self, Write};
use std::time::Instant;

use rotation_poset::{find_rotation_graph, gen_random, ExecutionStats};

pub const CSV_HEADER: &str = "n,proposals,rejections,rotations,edges,ns";

/// Counts and wall time for one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub n: usize,
    pub seed: u64,
    pub proposals: u64,
    pub rejections: u64,
    pub rotations: u64,
    pub edges: u64,
    pub ns: u64,
}

impl Row {
    pub fn events(&self) -> u64 {
        self.proposals + self.rejections + self.rotations + self.edges
    }
}

/// One row per size and seed, in that order. Each instance is a complete
/// random `n x n` instance generated from the seed.
pub fn run(sizes: &[usize], seeds: u64) -> Vec<Row> {
    let mut rows = Vec::with_capacity(sizes.len() * seeds as usize);
    for &n in sizes {
        for seed in 0..seeds {
            let inst = gen_random(n, 1.0, seed).expect("sizes are positive");
            let start = Instant::now();
            let stats: ExecutionStats = find_rotation_graph(&inst).stats;
            let ns = start.elapsed().as_nanos() as u64;
            rows.push(Row {
                n,
                seed,
                proposals: stats.proposals,
                rejections: stats.rejections,
                rotations: stats.rotation_events,
                edges: stats.predecessor_edge_events,
                ns,
            });
        }
    }
    rows
}

pub fn write_csv(rows: &[Row], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n, r.proposals, r.rejections, r.rotations, r.edges, r.ns
        )?;
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape() {
        let rows = run(&[5, 10], 2);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("5,"));
        assert_eq!(lines[2].split(',').count(), 6);
    }

    #[test]
    fn events_grow_about_fourfold_when_n_doubles() {
        let rows = run(&[100, 200], 3);
        let mean = |n: usize| {
            let v: Vec<u64> = rows.iter().filter(|r| r.n == n).map(Row::events).collect();
            v.iter().sum::<u64>() as f64 / v.len() as f64
        };
        let ratio = mean(200) / mean(100);
        assert!(ratio <= 4.0 * 1.5, "ratio {ratio}");
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&x| (x, 3.0 * x * x))
            .collect();
        assert!((log_log_slope(&pts) - 2.0).abs() < 1e-9);
    }
}
