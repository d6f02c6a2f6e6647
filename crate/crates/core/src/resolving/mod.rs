//! Landmark construction, exhaustive verification and separating witnesses.

mod construct;
mod files;
mod verify;
mod witness;

pub use construct::{
    build_landmarks, hyperplanes_avoiding, Block, Case, ConstructionContext, LandmarkSet,
    Provenance,
};
pub use files::{
    landmark_file_json, landmark_file_value, landmark_set_from_value, read_landmark_file,
};
pub use verify::{
    check_collision, signature, verify_resolving, Certificate, Collision, Signature, VerifyOptions,
    VerifyStats,
};
pub use witness::{find_separating_landmark, Branch, Witness};
