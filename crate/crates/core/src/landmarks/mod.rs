//! 68-point facial landmarks and the three facial distances.
//!
//! Template indices follow the common 68-point layout:
//!
//! | range  | entity     |
//! |--------|------------|
//! | 0–16   | jaw        |
//! | 17–21  | right brow |
//! | 22–26  | left brow  |
//! | 27–35  | nose       |
//! | 36–41  | right eye  |
//! | 42–47  | left eye   |
//! | 48–60  | mouth      |
//! | 61–67  | lips       |
//!
//! Each brow is anchored at its middle point (19 and 24). Eyes, nose and
//! lips are anchored at the centroid of their index range. The three
//! features are brow-to-brow, eye-to-eye and nose-to-lips distances in
//! pixels, unnormalized.

mod file;
mod geometry;

pub use file::{
    distances_dataset, distances_to_csv, format_record, parse_landmarks, parse_landmarks_str, read_distances_csv,
    LandmarkFile, SkippedRecord, DISTANCE_CSV_HEADER,
};
pub use geometry::{
    euclidean, extract_all, extract_distances, region_anchor, DistanceFeatures, LandmarkSet, Point,
    Region, N_LANDMARKS,
};
