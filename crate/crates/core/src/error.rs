use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{requested} processing cells requested but only {free} grid coordinates are free")]
    NotEnoughSpace { requested: usize, free: usize },
    #[error("coordinate ({x}, {y}) lies outside the {width}x{height} grid")]
    OutOfBounds {
        x: i32,
        y: i32,
        width: i32,
        height: i32,
    },
    #[error("two cells occupy coordinate ({x}, {y})")]
    Collision { x: i32, y: i32 },
    #[error("cell id {0} appears more than once")]
    DuplicateId(u32),
    #[error("cannot step an episode that has already terminated")]
    EpisodeTerminated,
    #[error("evaluation requires a locked network")]
    NotLocked,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
