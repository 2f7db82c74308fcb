//! Frame-by-frame tracking with masked correlation filters.
//!
//! Each frame: crop a square search window around the previous centre,
//! resample it to a fixed grid of feature cells, locate the correlation
//! peak, move, re-crop, blend the feature model, and re-solve the filter
//! starting from the previous solver state.

mod detect;
mod features;
mod image;
mod sequence;
mod track;

pub use detect::{detect, response_spectrum, Detection};
pub use features::{extract_features, extract_raw, FeatureSet, ORIENTATION_BINS};
pub use image::{crop_square, crop_window, search_side, GrayImage};
pub use sequence::{
    format_boxes, parse_boxes, read_boxes, write_boxes, BoundingBox, FixtureSpec, Sequence, GROUNDTRUTH_FILE,
};
pub use track::{init, step, track_frames, TrackRun, TrackState, TrackerConfig};
