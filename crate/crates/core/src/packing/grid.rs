use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use crate::carnot::GroupSpec;
use crate::scalar::Real;

/// Keys are already mixed, so the hasher passes them through.
#[derive(Default)]
struct PassThrough(u64);

impl Hasher for PassThrough {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 << 8) ^ u64::from(b);
        }
    }
    fn write_u64(&mut self, n: u64) {
        self.0 = n;
    }
}

fn mix(cells: &[i64]) -> u64 {
    let mut h: u64 = 0x9e37_79b9_7f4a_7c15;
    for &c in cells {
        h ^= c as u64;
        h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
        h ^= h >> 33;
    }
    h
}

/// Grid hash for ball queries of radius at most `R`.
///
/// Horizontal axes use cells of side `R`. On Heisenberg groups the top
/// coordinate is keyed by `s = z - omega(c, p) / 2`, sheared about the center
/// `c` of the point's horizontal cell: for `d(q, p) <= R` with `q` in a
/// neighboring cell, `|s_p - t_q| <= R^2 / 4 + R |c - q|_1 / 2`, a window
/// independent of where the cell lies. Cells of side `R^2` keep bucket
/// occupancy bounded at every position. Hash collisions only add candidates;
/// callers filter by distance.
pub struct SpatialIndex<T> {
    group: GroupSpec,
    radius: T,
    buckets: HashMap<u64, Vec<u32>, BuildHasherDefault<PassThrough>>,
    points: Vec<Vec<T>>,
}

impl<T: Real> SpatialIndex<T> {
    pub fn new(group: GroupSpec, radius: T) -> Self {
        let floor = T::lit(1e-300).max(T::min_positive_value());
        let radius = if radius > floor { radius } else { floor };
        SpatialIndex { group, radius, buckets: HashMap::default(), points: Vec::new() }
    }

    fn horizontal(&self) -> usize {
        self.group.horizontal_dim()
    }

    fn cell_of(x: T, size: T) -> i64 {
        (x / size).floor().to_i64().unwrap_or(i64::MAX)
    }

    /// Center of horizontal cell `k` along one axis.
    fn center(&self, k: i64) -> T {
        (T::lit(k as f64) + T::lit(0.5)) * self.radius
    }

    /// `omega(c, p) / 2` for the horizontal cell centers `c`.
    fn shear(&self, cells: &[i64], p: &[T]) -> T {
        let m = self.horizontal() / 2;
        let mut s = T::zero();
        for i in 0..m {
            s = s + self.center(cells[i]) * p[m + i] - self.center(cells[m + i]) * p[i];
        }
        s * T::lit(0.5)
    }

    fn top_size(&self) -> T {
        self.radius * self.radius
    }

    /// Inserts a point; returns its id (insertion order).
    pub fn insert(&mut self, p: &[T]) -> usize {
        let id = self.points.len();
        let h = self.horizontal();
        let mut cells: Vec<i64> = p[..h].iter().map(|&x| Self::cell_of(x, self.radius)).collect();
        if self.group.is_abelian() {
            cells.extend(p[h..].iter().map(|&x| Self::cell_of(x, self.radius)));
        } else {
            let s = p[h] - self.shear(&cells, p);
            cells.push(Self::cell_of(s, self.top_size()));
        }
        self.buckets.entry(mix(&cells)).or_default().push(id as u32);
        self.points.push(p.to_vec());
        id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, id: usize) -> &[T] {
        &self.points[id]
    }

    fn visit<F: FnMut(usize, T)>(&self, key: u64, seen: &mut Vec<u64>, q: &[T], radius: T, f: &mut F) {
        // distinct cells can collide on a key; visit each bucket once
        if seen.contains(&key) {
            return;
        }
        seen.push(key);
        if let Some(bucket) = self.buckets.get(&key) {
            for &id in bucket {
                let d = self.group.distance(q, &self.points[id as usize]);
                if d <= radius {
                    f(id as usize, d);
                }
            }
        }
    }

    /// Calls `f(id, distance)` for every stored point within `radius` of `q`
    /// (`radius` must not exceed the construction radius).
    pub fn for_each_within<F: FnMut(usize, T)>(&self, q: &[T], radius: T, mut f: F) {
        debug_assert!(radius <= self.radius * (T::one() + T::lit(1e-12)));
        let n = q.len();
        let h = self.horizontal();
        let axes = if self.group.is_abelian() { n } else { h };
        let lo: Vec<i64> = (0..axes).map(|i| Self::cell_of(q[i] - radius, self.radius)).collect();
        let hi: Vec<i64> = (0..axes).map(|i| Self::cell_of(q[i] + radius, self.radius)).collect();
        let mut cur = lo.clone();
        let mut seen: Vec<u64> = Vec::new();
        let mut key_cells = cur.clone();
        loop {
            if self.group.is_abelian() {
                self.visit(mix(&cur), &mut seen, q, radius, &mut f);
            } else {
                let t = q[h] - self.shear(&cur, q);
                let spread = (0..h).fold(T::zero(), |a, i| a + (self.center(cur[i]) - q[i]).abs());
                let w = radius * radius / T::lit(4.0) + T::lit(0.5) * radius * spread;
                let (zl, zh) = (Self::cell_of(t - w, self.top_size()), Self::cell_of(t + w, self.top_size()));
                key_cells.truncate(h);
                key_cells.copy_from_slice(&cur);
                key_cells.push(zl);
                for z in zl..=zh {
                    key_cells[h] = z;
                    self.visit(mix(&key_cells), &mut seen, q, radius, &mut f);
                }
            }
            let mut d = axes;
            loop {
                if d == 0 {
                    return;
                }
                d -= 1;
                cur[d] += 1;
                if cur[d] <= hi[d] {
                    break;
                }
                cur[d] = lo[d];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in [GroupSpec::heisenberg(1).unwrap(), GroupSpec::euclidean(2).unwrap()] {
            let pts: Vec<Vec<f64>> =
                (0..3000).map(|_| (0..g.n()).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
            let r = 0.2;
            let mut idx = SpatialIndex::new(g, r);
            for p in &pts {
                idx.insert(p);
            }
            for q in pts.iter().take(100) {
                let mut got = Vec::new();
                idx.for_each_within(q, r, |id, _| got.push(id));
                got.sort_unstable();
                let want: Vec<usize> = (0..pts.len()).filter(|&j| g.distance(q, &pts[j]) <= r).collect();
                assert_eq!(got, want);
            }
        }
    }
}
