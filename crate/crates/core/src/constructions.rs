//! Exact placements for the asymmetric-neighbor example and the
//! disconnection construction above `5π/6`.
//!
//! Both use a fine power schedule (growth 1.001) so discovery stops at the
//! nearest reaching power instead of jumping straight to `P`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::network::{NodeId, Topology};
use crate::radio::RadioModel;

const FINE_GROWTH: f64 = 1.001;
const FINE_START: f64 = 1e-4;

pub fn fine_model(r_max: f64) -> Result<RadioModel> {
    RadioModel::fine(r_max, FINE_GROWTH, FINE_START)
}

#[derive(Debug, Clone)]
pub struct Example1 {
    pub topology: Topology,
    pub epsilon: f64,
    pub u0: NodeId,
    pub u1: NodeId,
    pub u2: NodeId,
    pub u3: NodeId,
    pub v: NodeId,
}

impl Example1 {
    /// Smallest cone angle at which `u0` stops before reaching `v`.
    pub fn min_alpha(&self) -> f64 {
        2.0 * PI / 3.0 + 2.0 * self.epsilon
    }

    pub fn names(&self) -> BTreeMap<NodeId, String> {
        [
            (self.u0, "u0"),
            (self.u1, "u1"),
            (self.u2, "u2"),
            (self.u3, "u3"),
            (self.v, "v"),
        ]
        .into_iter()
        .map(|(id, s)| (id, s.to_string()))
        .collect()
    }
}

/// Positions `[u0, u1, u2, u3, v]` with `u0` at the origin and `v` at `(R, 0)`,
/// without checking the range of `epsilon`.
pub fn example1_points(epsilon: f64, r_max: f64) -> [Point; 5] {
    let u0 = Point::new(0.0, 0.0);
    let v = Point::new(r_max, 0.0);
    // Triangle u0 u1 v has angles π/3+ε at u0, π/3 at u1 and π/3-ε at v.
    let side = r_max * (PI / 3.0 - epsilon).sin() / (PI / 3.0).sin();
    let u1 = u0.offset_polar(side, PI / 3.0 + epsilon);
    let u2 = u0.offset_polar(side, -(PI / 3.0 + epsilon));
    let u3 = Point::new(-r_max / 2.0, 0.0);
    [u0, u1, u2, u3, v]
}

/// Five nodes where `v` discovers `u0` but `u0` stops before reaching `v`
/// for `2π/3 + 2ε <= α <= 5π/6`.
pub fn build_example1(epsilon: f64, r_max: f64) -> Result<Example1> {
    if !(epsilon > 0.0 && epsilon < PI / 12.0) {
        return Err(Error::Construction(format!(
            "epsilon {epsilon} outside (0, pi/12)"
        )));
    }
    let pts = example1_points(epsilon, r_max);
    let topology = Topology::from_points(&pts, fine_model(r_max)?, 1.0)?;
    let id = |i: u32| NodeId(i);
    let ex = Example1 {
        topology,
        epsilon,
        u0: id(0),
        u1: id(1),
        u2: id(2),
        u3: id(3),
        v: id(4),
    };
    let d = |a, b| ex.topology.distance(a, b);
    let checks = [
        ("d(u0,v) = R", d(ex.u0, ex.v)? == r_max),
        ("d(u0,u1) < R", d(ex.u0, ex.u1)? < r_max),
        ("d(u1,v) > R", d(ex.u1, ex.v)? > r_max),
        ("d(u2,v) > R", d(ex.u2, ex.v)? > r_max),
    ];
    check_all(&checks)?;
    Ok(ex)
}

#[derive(Debug, Clone)]
pub struct Counter5pi6 {
    pub topology: Topology,
    pub epsilon: f64,
    /// `5π/6 + ε`.
    pub alpha: f64,
    pub u: [NodeId; 4],
    pub v: [NodeId; 4],
}

impl Counter5pi6 {
    pub fn u_cluster(&self) -> [NodeId; 4] {
        self.u
    }

    pub fn v_cluster(&self) -> [NodeId; 4] {
        self.v
    }

    pub fn names(&self) -> BTreeMap<NodeId, String> {
        (0..4)
            .flat_map(|i| [(self.u[i], format!("u{i}")), (self.v[i], format!("v{i}"))])
            .collect()
    }
}

/// Eight nodes whose max-power graph is connected only through `(u0, v0)`,
/// which CBTC(5π/6 + ε) drops.
///
/// `u0 = (0,0)`, `v0 = (R,0)`. `u1` sits straight above `u0`, `u2` at angle
/// `π/2 + α` and distance `R/2`, `u3` on the line `y = -R√3/2` just left of the
/// circle intersection `s'`. The v-cluster is the point reflection through the
/// midpoint of `u0 v0`.
pub fn build_counter_5pi6(epsilon: f64, r_max: f64) -> Result<Counter5pi6> {
    if !(epsilon > 0.0 && epsilon <= PI / 6.0) {
        return Err(Error::Construction(format!(
            "epsilon {epsilon} outside (0, pi/6]"
        )));
    }
    let alpha = 5.0 * PI / 6.0 + epsilon;
    let h = r_max * 3f64.sqrt() / 2.0;
    // Direction of u3 from u0: halfway between s' (at -π/3) and the α limit.
    let theta3 = -PI / 3.0 - epsilon / 2.0;
    let x3 = h / (-theta3).tan();
    let slack = r_max / 2.0 - x3;
    let u0 = Point::new(0.0, 0.0);
    let u1 = Point::new(0.0, slack / 4.0);
    let u2 = u0.offset_polar(r_max / 2.0, PI / 2.0 + alpha.min(PI));
    let u3 = Point::new(x3, -h);
    let mirror = |p: Point| Point::new(r_max - p.x, -p.y);
    let pts = [
        u0,
        u1,
        u2,
        u3,
        mirror(u0),
        mirror(u1),
        mirror(u2),
        mirror(u3),
    ];
    let topology = Topology::from_points(&pts, fine_model(r_max)?, 1.0)?;
    let c = Counter5pi6 {
        topology,
        epsilon,
        alpha,
        u: [NodeId(0), NodeId(1), NodeId(2), NodeId(3)],
        v: [NodeId(4), NodeId(5), NodeId(6), NodeId(7)],
    };
    let d = |a: NodeId, b: NodeId| c.topology.distance(a, b);
    let mut checks = vec![("d(u0,v0) = R".to_string(), d(c.u[0], c.v[0])? == r_max)];
    for i in 1..4 {
        checks.push((format!("d(u0,u{i}) < R"), d(c.u[0], c.u[i])? < r_max));
        checks.push((format!("d(v0,v{i}) < R"), d(c.v[0], c.v[i])? < r_max));
    }
    for i in 0..4 {
        for j in 0..4 {
            if i + j >= 1 {
                checks.push((format!("d(u{i},v{j}) > R"), d(c.u[i], c.v[j])? > r_max));
            }
        }
    }
    let checks: Vec<(&str, bool)> = checks.iter().map(|(s, ok)| (s.as_str(), *ok)).collect();
    check_all(&checks)?;
    Ok(c)
}

fn check_all(checks: &[(&str, bool)]) -> Result<()> {
    match checks.iter().find(|(_, ok)| !ok) {
        Some((what, _)) => Err(Error::Construction(format!("constraint failed: {what}"))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cbtc::run_cbtc;
    use crate::geometry::{angle_between, vertex_angle};
    use crate::network::{connected_components, max_power_graph};

    #[test]
    fn example1_angles() {
        let eps = PI / 24.0;
        let [u0, u1, u2, u3, v] = example1_points(eps, 500.0);
        assert!((vertex_angle(u0, v, u1).unwrap() - (PI / 3.0 + eps)).abs() < 1e-12);
        assert!((vertex_angle(u0, v, u2).unwrap() - (PI / 3.0 + eps)).abs() < 1e-12);
        assert!((vertex_angle(v, u1, u0).unwrap() - (PI / 3.0 - eps)).abs() < 1e-12);
        assert!((vertex_angle(u1, v, u0).unwrap() - PI / 3.0).abs() < 1e-12);
        assert!((vertex_angle(u0, v, u3).unwrap() - PI).abs() < 1e-12);
        assert_eq!(u0.distance(&u3), 250.0);
    }

    #[test]
    fn example1_asymmetry() {
        let ex = build_example1(PI / 24.0, 500.0).unwrap();
        let r = run_cbtc(&ex.topology, 5.0 * PI / 6.0).unwrap();
        let n0: Vec<NodeId> = r.n_alpha.neighbors(ex.u0).collect();
        assert_eq!(n0, vec![ex.u1, ex.u2, ex.u3]);
        let nv: Vec<NodeId> = r.n_alpha.neighbors(ex.v).collect();
        assert_eq!(nv, vec![ex.u0]);
        assert!(r.states[&ex.u0].power < 1.0);
    }

    #[test]
    fn example1_range_is_enforced() {
        assert!(build_example1(0.0, 500.0).is_err());
        assert!(build_example1(PI / 12.0, 500.0).is_err());
    }

    #[test]
    fn counter_geometry() {
        for eps in [PI / 72.0, PI / 36.0, PI / 18.0, PI / 6.0] {
            let c = build_counter_5pi6(eps, 500.0).unwrap();
            let t = &c.topology;
            let p = |i: NodeId| t.position(i).unwrap();
            let right = vertex_angle(p(c.u[0]), p(c.u[1]), p(c.v[0])).unwrap();
            assert!((right - PI / 2.0).abs() < 1e-12);
            let u1u2 = vertex_angle(p(c.u[0]), p(c.u[1]), p(c.u[2])).unwrap();
            assert!((u1u2 - c.alpha.min(PI)).abs() < 1e-9);
            assert!(vertex_angle(p(c.u[0]), p(c.u[3]), p(c.u[1])).unwrap() < c.alpha);
            assert_eq!(connected_components(&max_power_graph(t)).unwrap().len(), 1);
            let dir = angle_between(p(c.u[0]), p(c.v[0])).unwrap();
            assert_eq!(dir.radians(), 0.0);
        }
        assert!(build_counter_5pi6(0.0, 500.0).is_err());
    }

    #[test]
    fn counter_disconnects_above_5pi6() {
        let c = build_counter_5pi6(PI / 36.0, 500.0).unwrap();
        let r = run_cbtc(&c.topology, c.alpha).unwrap();
        assert_eq!(connected_components(&r.e_alpha).unwrap().len(), 2);
        let u0 = &r.states[&c.u[0]];
        assert!(u0.power < 1.0);
        let needed = [c.u[2], c.u[3]]
            .iter()
            .map(|&x| c.topology.distance(c.u[0], x).unwrap())
            .fold(0.0, f64::max);
        assert_eq!(r.radii[&c.u[0]].rad_minus, needed);
        let at = run_cbtc(&c.topology, 5.0 * PI / 6.0).unwrap();
        assert_eq!(connected_components(&at.e_alpha).unwrap().len(), 1);
    }
}
