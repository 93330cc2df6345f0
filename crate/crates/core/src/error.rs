use thiserror::Error;

use crate::model::{DeviceId, ServiceId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("device {0} has a non-positive cpu speed")]
    NonPositiveSpeed(DeviceId),

    #[error("invalid transmission: {0}")]
    InvalidTransmission(String),

    #[error("link {0} -> {1} is down")]
    LinkDown(DeviceId, DeviceId),

    #[error("device {to} is unreachable from device {from}")]
    Unreachable { from: DeviceId, to: DeviceId },

    #[error("service {0} depends on an unplaced service")]
    UnplacedDependency(ServiceId),

    #[error("duplicate device id {0}")]
    DuplicateDevice(DeviceId),

    #[error("device ids must be dense and ordered; found {found} at position {position}")]
    NonDenseDeviceIds { position: usize, found: DeviceId },

    #[error("link {0} -- {1} references an unknown device")]
    DanglingLink(DeviceId, DeviceId),

    #[error("duplicate link {0} -- {1}")]
    DuplicateLink(DeviceId, DeviceId),

    #[error("invalid device {0}: {1}")]
    InvalidDevice(DeviceId, String),

    #[error("invalid application {0}: {1}")]
    InvalidApplication(u32, String),

    #[error("partition assignment covers {got} nodes, graph has {expected}")]
    AssignmentMismatch { expected: usize, got: usize },

    #[error("cannot compute the feature of an empty partition")]
    EmptyPartition,

    #[error("no services were requested")]
    ZeroServices,

    #[error("cannot commit service {service} on device {device}: {reason}")]
    OverCommit {
        device: DeviceId,
        service: ServiceId,
        reason: &'static str,
    },

    #[error("invalid fitness configuration: {0}")]
    InvalidFitness(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
