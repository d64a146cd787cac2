//! Distance, coverage and segment-intersection primitives.

use serde::{Deserialize, Serialize};

use crate::scenario::{Scenario, SensorNode};

/// Tolerance for orientation tests, in m². Coordinates are O(10²) m, so
/// this is far below geometric significance.
const CROSS_EPS: f64 = 1e-9;

/// A candidate hover location of the UAV, projected onto the ground plane.
/// The UAV itself sits at the scenario's flight altitude above this point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoverPoint {
    pub x: f64,
    pub y: f64,
}

impl HoverPoint {
    pub fn new(x: f64, y: f64) -> Self {
        HoverPoint { x, y }
    }

    /// Ground-plane distance to another point.
    pub fn planar_dist(&self, other: &HoverPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// A straight flight path between two ground-plane points.
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub a: HoverPoint,
    pub b: HoverPoint,
}

impl Segment {
    pub fn new(a: HoverPoint, b: HoverPoint) -> Self {
        Segment { a, b }
    }
}

/// Slant distance between a UAV hovering at altitude `h` above `p` and a
/// ground node `s`.
pub fn dist_uav_node(p: &HoverPoint, s: &SensorNode, h: f64) -> f64 {
    let dx = p.x - s.x;
    let dy = p.y - s.y;
    (dx * dx + dy * dy + h * h).sqrt()
}

/// Whether a UAV hovering above `p` can charge node `s`: the slant distance
/// must not exceed the scenario's maximum charging range (boundary
/// inclusive).
pub fn covers(p: &HoverPoint, s: &SensorNode, scenario: &Scenario) -> bool {
    dist_uav_node(p, s, scenario.altitude) <= scenario.d_max
}

fn orientation(a: HoverPoint, b: HoverPoint, c: HoverPoint) -> i8 {
    let cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if cross > CROSS_EPS {
        1
    } else if cross < -CROSS_EPS {
        -1
    } else {
        0
    }
}

fn same_point(a: HoverPoint, b: HoverPoint) -> bool {
    (a.x - b.x).abs() <= CROSS_EPS && (a.y - b.y).abs() <= CROSS_EPS
}

/// Given collinear a, p, b, whether p lies within the bounding box of ab.
fn on_segment(a: HoverPoint, p: HoverPoint, b: HoverPoint) -> bool {
    p.x <= a.x.max(b.x) + CROSS_EPS
        && p.x >= a.x.min(b.x) - CROSS_EPS
        && p.y <= a.y.max(b.y) + CROSS_EPS
        && p.y >= a.y.min(b.y) - CROSS_EPS
}

/// Whether two closed segments share a point, with two conventions chosen
/// for tour uncrossing: segments that share an endpoint report `false`
/// (consecutive tour edges always touch at a vertex and must not count),
/// and zero-length segments intersect nothing. Collinear overlap without a
/// shared endpoint counts as an intersection.
pub fn segments_intersect(s1: &Segment, s2: &Segment) -> bool {
    if same_point(s1.a, s1.b) || same_point(s2.a, s2.b) {
        return false;
    }
    if same_point(s1.a, s2.a)
        || same_point(s1.a, s2.b)
        || same_point(s1.b, s2.a)
        || same_point(s1.b, s2.b)
    {
        return false;
    }

    let o1 = orientation(s1.a, s1.b, s2.a);
    let o2 = orientation(s1.a, s1.b, s2.b);
    let o3 = orientation(s2.a, s2.b, s1.a);
    let o4 = orientation(s2.a, s2.b, s1.b);

    if o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        return true;
    }

    // Collinear or endpoint-on-interior cases.
    (o1 == 0 && on_segment(s1.a, s2.a, s1.b))
        || (o2 == 0 && on_segment(s1.a, s2.b, s1.b))
        || (o3 == 0 && on_segment(s2.a, s1.a, s2.b))
        || (o4 == 0 && on_segment(s2.a, s1.b, s2.b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    fn node(x: f64, y: f64) -> SensorNode {
        SensorNode { id: 0, x, y }
    }

    fn seg(ax: f64, ay: f64, bx: f64, by: f64) -> Segment {
        Segment::new(HoverPoint::new(ax, ay), HoverPoint::new(bx, by))
    }

    #[test]
    fn slant_distance_directly_above() {
        let d = dist_uav_node(&HoverPoint::new(5.0, 5.0), &node(5.0, 5.0), 10.0);
        assert_eq!(d, 10.0);
    }

    #[test]
    fn slant_distance_diagonal() {
        // 10 m planar offset at 10 m altitude.
        let d = dist_uav_node(&HoverPoint::new(10.0, 0.0), &node(0.0, 0.0), 10.0);
        assert!((d - 200f64.sqrt()).abs() < 1e-12);
        assert!((d - 14.142135623730951).abs() < 1e-9);
    }

    #[test]
    fn slant_distance_3_4_12_13() {
        let d = dist_uav_node(&HoverPoint::new(3.0, 4.0), &node(0.0, 0.0), 12.0);
        assert!((d - 13.0).abs() < 1e-12);
    }

    #[test]
    fn distance_never_below_altitude() {
        let mut rng = crate::scenario::test_rng(7);
        use rand::Rng;
        for _ in 0..200 {
            let p = HoverPoint::new(rng.gen_range(0.0..500.0), rng.gen_range(0.0..500.0));
            let s = node(rng.gen_range(0.0..500.0), rng.gen_range(0.0..500.0));
            let h = rng.gen_range(1.0..50.0);
            let d = dist_uav_node(&p, &s, h);
            assert!(d >= h);
            if p.x == s.x && p.y == s.y {
                assert_eq!(d, h);
            }
        }
    }

    fn range_scenario(d_max: f64) -> Scenario {
        let origin_node = SensorNode { id: 0, x: 0.0, y: 0.0 };
        Scenario::new(vec![origin_node], (500.0, 500.0), 10.0, d_max, 0).unwrap()
    }

    #[test]
    fn coverage_boundary_inclusive() {
        let sc = range_scenario(10.0 * 2f64.sqrt());
        let s = &sc.nodes[0];
        // Offset 10 at h=10 against d_max = 10√2: exactly on the boundary.
        let p = HoverPoint::new(10.0, 0.0);
        assert!(covers(&p, s, &sc));
        // Just outside.
        let p2 = HoverPoint::new(10.001, 0.0);
        assert!(!covers(&p2, s, &sc));
        // Zero offset is always covered when d_max > h.
        assert!(covers(&HoverPoint::new(0.0, 0.0), s, &sc));
    }

    #[test]
    fn coverage_monotone_in_range() {
        use rand::Rng;
        let mut rng = crate::scenario::test_rng(11);
        let sc_wide = range_scenario(30.0);
        let sc_narrow = range_scenario(15.0);
        for _ in 0..200 {
            let s = &sc_wide.nodes[0];
            let p = HoverPoint::new(rng.gen_range(-40.0..40.0), rng.gen_range(-40.0..40.0));
            if covers(&p, s, &sc_narrow) {
                assert!(covers(&p, &sc_wide.nodes[0], &sc_wide));
            }
        }
    }

    #[test]
    fn proper_crossing() {
        assert!(segments_intersect(
            &seg(0.0, 0.0, 2.0, 2.0),
            &seg(0.0, 2.0, 2.0, 0.0)
        ));
    }

    #[test]
    fn shared_endpoint_is_not_an_intersection() {
        assert!(!segments_intersect(
            &seg(0.0, 0.0, 1.0, 1.0),
            &seg(1.0, 1.0, 2.0, 0.0)
        ));
        // Even with collinear overlap past the shared endpoint.
        assert!(!segments_intersect(
            &seg(0.0, 0.0, 2.0, 0.0),
            &seg(0.0, 0.0, 1.0, 0.0)
        ));
    }

    #[test]
    fn parallel_disjoint() {
        assert!(!segments_intersect(
            &seg(0.0, 0.0, 2.0, 0.0),
            &seg(0.0, 1.0, 2.0, 1.0)
        ));
    }

    #[test]
    fn collinear_overlap_counts() {
        assert!(segments_intersect(
            &seg(0.0, 0.0, 3.0, 0.0),
            &seg(1.0, 0.0, 2.0, 0.0)
        ));
        assert!(segments_intersect(
            &seg(0.0, 0.0, 2.0, 0.0),
            &seg(1.0, 0.0, 3.0, 0.0)
        ));
        // Touching end-to-end without sharing: (2,0) is an endpoint of both.
        assert!(!segments_intersect(
            &seg(0.0, 0.0, 2.0, 0.0),
            &seg(2.0, 0.0, 3.0, 0.0)
        ));
    }

    #[test]
    fn degenerate_segments_intersect_nothing() {
        assert!(!segments_intersect(
            &seg(1.0, 1.0, 1.0, 1.0),
            &seg(0.0, 0.0, 2.0, 2.0)
        ));
    }

    #[test]
    fn endpoint_in_interior_counts() {
        // T junction: endpoint of one segment on the interior of the other.
        assert!(segments_intersect(
            &seg(0.0, 0.0, 4.0, 0.0),
            &seg(2.0, 0.0, 2.0, 3.0)
        ));
    }

    #[test]
    fn intersection_is_symmetric() {
        use rand::Rng;
        let mut rng = crate::scenario::test_rng(13);
        for _ in 0..500 {
            let mut p = || HoverPoint::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
            let s1 = Segment::new(p(), p());
            let s2 = Segment::new(p(), p());
            assert_eq!(segments_intersect(&s1, &s2), segments_intersect(&s2, &s1));
        }
    }
}
