/// Rejection from an [`Authenticator`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AuthError {
    #[error("display name is empty")]
    EmptyName,
    #[error("display name is longer than {0} characters")]
    NameTooLong(usize),
    #[error("{0}")]
    Denied(String),
}

impl AuthError {
    pub fn code(&self) -> &'static str {
        match self {
            AuthError::EmptyName => "name_empty",
            AuthError::NameTooLong(_) => "name_too_long",
            AuthError::Denied(_) => "denied",
        }
    }
}

/// Decides who may enter a room and under which display name.
pub trait Authenticator: Send + Sync + 'static {
    /// Returns the display name to use.
    fn authenticate(&self, name: &str, credential: Option<&str>) -> Result<String, AuthError>;
}

/// Accepts any non-empty display name.
#[derive(Clone, Copy, Debug, Default)]
pub struct OpenAuth;

pub const MAX_NAME_LEN: usize = 32;

impl Authenticator for OpenAuth {
    fn authenticate(&self, name: &str, _credential: Option<&str>) -> Result<String, AuthError> {
        let name = name.trim();
        if name.is_empty() {
            return Err(AuthError::EmptyName);
        }
        if name.chars().count() > MAX_NAME_LEN {
            return Err(AuthError::NameTooLong(MAX_NAME_LEN));
        }
        Ok(name.to_string())
    }
}
