use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::{Error, Result};

pub const N_LANDMARKS: usize = 68;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// The 68 landmark points of one face image.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSet {
    image_id: String,
    class_label: u8,
    points: Vec<Point>,
}

impl LandmarkSet {
    /// Validates the point count, the label, and that every coordinate is finite and non-negative.
    pub fn new(image_id: impl Into<String>, class_label: u8, points: Vec<Point>) -> Result<Self> {
        if points.len() != N_LANDMARKS {
            return Err(Error::ShapeMismatch {
                expected: format!("{N_LANDMARKS} points"),
                found: format!("{} points", points.len()),
            });
        }
        if class_label > 1 {
            return Err(Error::InvalidArgument(format!(
                "class label {class_label} is not binary"
            )));
        }
        if let Some(p) = points
            .iter()
            .find(|p| !(p.x.is_finite() && p.y.is_finite() && p.x >= 0.0 && p.y >= 0.0))
        {
            return Err(Error::InvalidArgument(format!(
                "coordinate ({}, {}) is not a finite non-negative pixel position",
                p.x, p.y
            )));
        }
        Ok(LandmarkSet {
            image_id: image_id.into(),
            class_label,
            points,
        })
    }

    pub fn image_id(&self) -> &str {
        &self.image_id
    }

    pub fn class_label(&self) -> u8 {
        self.class_label
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Point {
        self.points[index]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    LeftBrow,
    RightBrow,
    LeftEye,
    RightEye,
    Nose,
    Lips,
}

impl Region {
    fn indices(self) -> RangeInclusive<usize> {
        match self {
            Region::RightBrow => 19..=19,
            Region::LeftBrow => 24..=24,
            Region::RightEye => 36..=41,
            Region::LeftEye => 42..=47,
            Region::Nose => 27..=35,
            Region::Lips => 61..=67,
        }
    }
}

/// Straight-line pixel distance between two points.
pub fn euclidean(a: Point, b: Point) -> Result<f64> {
    if !(a.x.is_finite() && a.y.is_finite() && b.x.is_finite() && b.y.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(distance(a, b))
}

fn distance(a: Point, b: Point) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    (dx * dx + dy * dy).sqrt()
}

/// Representative point of a facial entity: the brow midpoint, or the centroid of the entity's range.
pub fn region_anchor(l: &LandmarkSet, region: Region) -> Point {
    let range = region.indices();
    let n = range.clone().count() as f64;
    let (sx, sy) = l.points[range]
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point::new(sx / n, sy / n)
}

/// The three facial features of one face, with its id and class.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceFeatures {
    pub image_id: String,
    pub class_label: u8,
    pub brow_distance: f64,
    pub eye_distance: f64,
    pub nose_lips_distance: f64,
}

impl DistanceFeatures {
    pub fn as_array(&self) -> [f64; 3] {
        [self.brow_distance, self.eye_distance, self.nose_lips_distance]
    }
}

pub fn extract_distances(l: &LandmarkSet) -> DistanceFeatures {
    let between = |a, b| distance(region_anchor(l, a), region_anchor(l, b));
    DistanceFeatures {
        image_id: l.image_id.clone(),
        class_label: l.class_label,
        brow_distance: between(Region::RightBrow, Region::LeftBrow),
        eye_distance: between(Region::RightEye, Region::LeftEye),
        nose_lips_distance: between(Region::Nose, Region::Lips),
    }
}

/// Parallel [`extract_distances`]; output order matches input order.
pub fn extract_all(sets: &[LandmarkSet]) -> Vec<DistanceFeatures> {
    sets.par_iter().map(extract_distances).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn face(f: impl Fn(usize) -> Point) -> LandmarkSet {
        LandmarkSet::new("t", 0, (0..N_LANDMARKS).map(f).collect()).unwrap()
    }

    #[test]
    fn three_four_five() {
        assert_eq!(euclidean(Point::new(0.0, 0.0), Point::new(3.0, 4.0)).unwrap(), 5.0);
        assert_eq!(euclidean(Point::new(1.0, 1.0), Point::new(4.0, 5.0)).unwrap(), 5.0);
        assert_eq!(euclidean(Point::new(7.0, 2.0), Point::new(7.0, 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_is_rejected() {
        assert!(matches!(
            euclidean(Point::new(f64::NAN, 0.0), Point::new(0.0, 0.0)),
            Err(Error::NonFinite)
        ));
        assert!(euclidean(Point::new(0.0, 0.0), Point::new(0.0, f64::INFINITY)).is_err());
    }

    #[test]
    fn brows_are_points_19_and_24() {
        let l = face(|i| Point::new(i as f64, 2.0 * i as f64));
        assert_eq!(region_anchor(&l, Region::RightBrow), l.point(19));
        assert_eq!(region_anchor(&l, Region::LeftBrow), l.point(24));
    }

    #[test]
    fn eye_centroid_of_identical_points() {
        let l = face(|i| {
            if (36..=41).contains(&i) {
                Point::new(10.0, 10.0)
            } else {
                Point::new(0.0, 0.0)
            }
        });
        assert_eq!(region_anchor(&l, Region::RightEye), Point::new(10.0, 10.0));
    }

    #[test]
    fn nose_centroid_of_stepped_points() {
        let l = face(|i| {
            if (27..=35).contains(&i) {
                let s = (i - 27) as f64;
                Point::new(s, s)
            } else {
                Point::new(50.0, 50.0)
            }
        });
        assert_eq!(region_anchor(&l, Region::Nose), Point::new(4.0, 4.0));
    }

    #[test]
    fn brow_distance_by_hand() {
        let l = face(|i| match i {
            19 => Point::new(40.0, 50.0),
            24 => Point::new(80.0, 50.0),
            _ => Point::new(60.0, 60.0),
        });
        assert_eq!(extract_distances(&l).brow_distance, 40.0);
    }

    #[test]
    fn coincident_points_give_zero() {
        let d = extract_distances(&face(|_| Point::new(12.0, 34.0)));
        assert_eq!(d.as_array(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn validation() {
        assert!(LandmarkSet::new("a", 0, vec![Point::default(); 60]).is_err());
        let mut pts = vec![Point::default(); 68];
        pts[3] = Point::new(-1.0, 0.0);
        assert!(LandmarkSet::new("a", 0, pts.clone()).is_err());
        pts[3] = Point::new(f64::NAN, 0.0);
        assert!(LandmarkSet::new("a", 0, pts).is_err());
        assert!(LandmarkSet::new("a", 2, vec![Point::default(); 68]).is_err());
    }

    #[test]
    fn extract_all_keeps_order() {
        let sets: Vec<_> = (0..50)
            .map(|k| {
                LandmarkSet::new(
                    format!("f{k}"),
                    (k % 2) as u8,
                    (0..68).map(|i| Point::new((i * k) as f64, i as f64)).collect(),
                )
                .unwrap()
            })
            .collect();
        let out = extract_all(&sets);
        let ids: Vec<_> = out.iter().map(|d| d.image_id.clone()).collect();
        let want: Vec<_> = (0..50).map(|k| format!("f{k}")).collect();
        assert_eq!(ids, want);
    }

    fn arb_point() -> impl Strategy<Value = Point> {
        (0.0f64..1000.0, 0.0f64..1000.0).prop_map(|(x, y)| Point::new(x, y))
    }

    proptest! {
        #[test]
        fn metric_axioms(a in arb_point(), b in arb_point(), c in arb_point()) {
            let ab = euclidean(a, b).unwrap();
            prop_assert_eq!(ab, euclidean(b, a).unwrap());
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(euclidean(a, a).unwrap(), 0.0);
            if a != b { prop_assert!(ab > 0.0); }
            let ac = euclidean(a, c).unwrap();
            let cb = euclidean(c, b).unwrap();
            prop_assert!(ab <= ac + cb + 1e-9);
        }

        #[test]
        fn mirroring_keeps_brow_and_eye_distances(pts in proptest::collection::vec(arb_point(), 68)) {
            let l = LandmarkSet::new("m", 1, pts.clone()).unwrap();
            let mirrored: Vec<_> = pts.iter().map(|p| Point::new(2000.0 - p.x, p.y)).collect();
            let m = LandmarkSet::new("m", 1, mirrored).unwrap();
            let (a, b) = (extract_distances(&l), extract_distances(&m));
            prop_assert!((a.brow_distance - b.brow_distance).abs() < 1e-9);
            prop_assert!((a.eye_distance - b.eye_distance).abs() < 1e-9);
        }
    }
}
