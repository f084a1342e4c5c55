//! Statistical object counting.
//!
//! Counts similarly sized, mostly round objects without finding each one:
//!
//! 1. **Segmentation** ([`segmentation`]): Otsu thresholding or seeded region
//!    growing turns a grayscale image into an object/background mask.
//! 2. **Enhancement** ([`enhance`]): a binary median filter closes small gaps
//!    that would split runs.
//! 3. **Sizing** ([`sizing`]): the histogram of run lengths along one
//!    direction is smoothed and the object diameter is read off just right of
//!    its peak, where it drops to `alpha` times the peak value.
//! 4. **Counting** ([`counting`]): object area divided by the area of one
//!    disc of that diameter.
//!
//! Every stage is linear in the number of pixels. [`synthetic`] generates
//! random disc scenes with known ground truth for validating the estimator.

pub mod cli;
pub mod counting;
pub mod enhance;
pub mod error;
pub mod imageio;
pub mod segmentation;
pub mod sizing;
pub mod synthetic;

pub use counting::{count_objects, run_pipeline, CountResult, PipelineConfig};
pub use error::{Error, Result, Stage};
pub use imageio::{load_gray, save_mask, BinaryMask, GrayImage};
pub use segmentation::{Method, Polarity, SegmentationConfig};
pub use sizing::{estimate_diameter, extract_runs, Direction, RunHistogram, SizeEstimate, SmoothedHistogram};
