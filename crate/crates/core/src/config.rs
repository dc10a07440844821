//! Analysis configuration. Every list falls back to its default when the key
//! is absent from the JSON file; a key that is present replaces the default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde::{Deserialize, Serialize};

use crate::taxonomy::RuleOverride;

pub const CONFIG_ENV: &str = "VRTESTLINT_CONFIG";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct Config {
    pub test_attributes: Vec<String>,
    pub fixture_attributes: Vec<String>,
    pub setup_attributes: Vec<String>,
    pub teardown_attributes: Vec<String>,
    /// Receiver heads that mark an invocation as an assertion.
    pub assertion_apis: Vec<String>,
    /// Engine identifiers: never production calls, reported as API signals.
    pub engine_apis: Vec<String>,
    /// Keywords matched at camel-case word boundaries in receiver and type names.
    pub resource_patterns: Vec<String>,
    /// `Type.Member` invocations or `new Type` constructions producing mocks.
    pub mock_apis: Vec<String>,
    pub in_memory_patterns: Vec<String>,
    /// Directory names skipped during the walk, compared case-insensitively.
    pub exclude_dirs: Vec<String>,
    pub exclude_globs: Vec<String>,
    /// Count only production calls whose result flows into an assertion.
    pub eager_requires_assertion: bool,
    pub arity_overrides: BTreeMap<String, usize>,
    pub taxonomy_rules: Option<RuleOverride>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            test_attributes: strings(&["Test", "UnityTest", "TestCase", "TestCaseSource"]),
            fixture_attributes: strings(&["TestFixture"]),
            setup_attributes: strings(&["SetUp", "OneTimeSetUp", "UnitySetUp"]),
            teardown_attributes: strings(&["TearDown", "OneTimeTearDown", "UnityTearDown"]),
            assertion_apis: strings(&["Assert", "StringAssert", "CollectionAssert", "Assume", "LogAssert"]),
            engine_apis: strings(DEFAULT_ENGINE_APIS),
            resource_patterns: strings(&[
                "File",
                "Directory",
                "StreamReader",
                "StreamWriter",
                "Sqlite",
                "SqlConnection",
                "HttpClient",
                "WebRequest",
                "Socket",
            ]),
            mock_apis: strings(&["Substitute.For", "Mock.Of", "new Mock"]),
            in_memory_patterns: strings(&[":memory:", "MemoryStream", "StringReader", "StringWriter", "InMemory"]),
            exclude_dirs: strings(&["Library", "Temp", "Obj", "Bin", ".git", "PackageCache"]),
            exclude_globs: strings(&["**/*.designer.cs", "**/*.Designer.cs"]),
            eager_requires_assertion: false,
            arity_overrides: BTreeMap::new(),
            taxonomy_rules: None,
        }
    }
}

impl Config {
    pub fn from_json_str(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        let config: Config = serde_json::from_str(text).map_err(|source| ConfigError::Parse {
            path: origin.to_path_buf(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text, path)
    }

    /// Explicit path, else the environment fallback, else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        if let Some(path) = explicit {
            return Self::load(path);
        }
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.exclude_matcher()?;
        if let Some(rules) = &self.taxonomy_rules {
            rules.validate().map_err(ConfigError::Invalid)?;
        }
        Ok(())
    }

    pub fn exclude_matcher(&self) -> Result<GlobSet, ConfigError> {
        let mut builder = GlobSetBuilder::new();
        for pattern in &self.exclude_globs {
            let glob = Glob::new(pattern)
                .map_err(|e| ConfigError::Invalid(format!("exclude glob `{pattern}`: {e}")))?;
            builder.add(glob);
        }
        builder
            .build()
            .map_err(|e| ConfigError::Invalid(format!("exclude globs: {e}")))
    }

    pub fn is_excluded_dir(&self, name: &str) -> bool {
        self.exclude_dirs.iter().any(|d| d.eq_ignore_ascii_case(name))
    }

    pub fn is_engine_api(&self, name: &str) -> bool {
        self.engine_apis.iter().any(|a| a == name)
    }

    pub fn is_assertion_head(&self, name: &str) -> bool {
        self.assertion_apis.iter().any(|a| a == name)
    }
}

pub const DEFAULT_ENGINE_APIS: &[&str] = &[
    // scene graph and object lifetime
    "GameObject", "Transform", "transform", "gameObject", "MonoBehaviour", "ScriptableObject",
    "Object", "Component", "Instantiate", "Destroy", "DestroyImmediate", "DontDestroyOnLoad",
    "Find", "FindObjectOfType", "FindObjectsOfType", "FindGameObjectWithTag",
    "FindGameObjectsWithTag", "FindWithTag", "GetComponent", "GetComponents",
    "GetComponentInChildren", "GetComponentsInChildren", "GetComponentInParent", "AddComponent",
    "SetActive", "CompareTag", "SetParent", "GetChild", "SceneManager", "LoadScene",
    // math, time, input, logging
    "Debug", "Mathf", "Vector2", "Vector3", "Vector4", "Quaternion", "Color", "Time", "Input",
    "Random", "Application", "LayerMask", "Translate", "Rotate", "LookAt", "position",
    "localPosition", "rotation", "localScale",
    // coroutines and messages
    "StartCoroutine", "StopCoroutine", "StopAllCoroutines", "Coroutine", "WaitForSeconds",
    "WaitForEndOfFrame", "WaitForFixedUpdate", "WaitUntil", "WaitWhile", "Invoke",
    "InvokeRepeating", "SendMessage", "BroadcastMessage",
    // physics
    "Physics", "Physics2D", "Rigidbody", "Rigidbody2D", "AddForce", "AddTorque", "velocity",
    "angularVelocity", "mass", "useGravity", "isKinematic", "Collider", "Collider2D",
    "BoxCollider", "SphereCollider", "CapsuleCollider", "MeshCollider", "CharacterController",
    "Collision", "Collision2D", "OnTriggerEnter", "OnTriggerExit", "OnTriggerStay",
    "OnCollisionEnter", "OnCollisionExit", "OnCollisionStay", "isTrigger", "Raycast",
    "RaycastHit", "Ray",
    // rendering and display
    "Camera", "Display", "Screen", "Renderer", "MeshRenderer", "SkinnedMeshRenderer",
    "SpriteRenderer", "LineRenderer", "TrailRenderer", "Shader", "Material", "Texture",
    "Texture2D", "RenderTexture", "Mesh", "Light", "ParticleSystem", "Sprite",
    // animation and audio
    "Animator", "Animation", "AnimationClip", "AudioSource", "AudioClip", "AudioListener",
    "AudioMixer",
    // assets, data, network
    "AssetDatabase", "Resources", "AssetBundle", "PlayerPrefs", "UnityWebRequest",
    "NetworkManager", "NetworkServer", "NetworkClient",
    // UI
    "Canvas", "Text", "Button", "Image", "InputField", "Slider", "Toggle", "Dropdown",
    "EventSystem", "RectTransform", "TextMesh", "TextMeshPro", "TextMeshProUGUI",
    // XR
    "XRSettings", "XRDevice", "InputTracking", "XRNode",
];
