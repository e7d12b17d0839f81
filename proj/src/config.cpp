#include "vrtestlint/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vrtestlint {

using nlohmann::json;

namespace {

const char* const kEngineApis[] = {
    // Unity runtime surface
    "GameObject", "MonoBehaviour", "Component", "Transform", "transform", "gameObject",
    "Object", "Instantiate", "Destroy", "DestroyImmediate", "GetComponent",
    "GetComponentInChildren", "GetComponents", "AddComponent", "Find", "FindObjectOfType",
    "FindObjectsOfType", "FindGameObjectWithTag", "FindGameObjectsWithTag", "SetActive",
    "Rigidbody", "Rigidbody2D", "Collider", "BoxCollider", "SphereCollider", "Collision",
    "Physics", "Physics2D", "Raycast", "Camera", "Animator", "Animation", "AudioSource",
    "AudioClip", "AudioListener", "PlayerPrefs", "WaitForSeconds", "WaitForEndOfFrame",
    "WaitForFixedUpdate", "WaitUntil", "WaitWhile", "Renderer", "MeshRenderer",
    "SpriteRenderer", "Shader", "Material", "Texture", "Texture2D", "RenderTexture",
    "AssetDatabase", "AssetBundle", "Resources", "UnityWebRequest", "Canvas", "Text", "Button",
    "InputField", "Slider", "Toggle", "StopAllCoroutines", "StartCoroutine", "StopCoroutine",
    "Debug", "Mathf", "Vector2", "Vector3", "Vector4", "Quaternion", "Color", "Time", "Input",
    "Application", "SceneManager", "Screen", "Display", "LayerMask", "Random",
    // .NET base library
    "Math", "String", "string", "Console", "Convert", "Enumerable", "Task", "Thread",
    "Parallel", "Guid", "DateTime", "TimeSpan", "ToString", "Equals", "GetType",
    "GetHashCode", "nameof", "typeof",
    // NUnit constraint model
    "Is", "Has", "Does", "Throws", "Iz",
};

const char* const kResourcePatterns[] = {
    "File",   "Directory",     "StreamReader", "StreamWriter", "Sqlite",
    "SqlConnection", "HttpClient", "WebRequest",  "Socket",
};

std::set<std::string> string_set(const json& value, const char* key) {
  if (!value.is_array()) throw ConfigError(std::string("'") + key + "' must be an array of strings");
  std::set<std::string> out;
  for (const auto& item : value) {
    if (!item.is_string()) throw ConfigError(std::string("'") + key + "' must contain strings");
    out.insert(item.get<std::string>());
  }
  return out;
}

std::vector<std::string> string_list(const json& value, const char* key) {
  string_set(value, key);
  std::vector<std::string> out;
  for (const auto& item : value) out.push_back(item.get<std::string>());
  return out;
}

std::map<std::string, ArityRange> parse_arity(const json& doc) {
  if (!doc.is_object()) throw ConfigError("assertion arity table must be an object");
  std::map<std::string, ArityRange> out;
  for (const auto& [name, value] : doc.items()) {
    ArityRange range;
    if (value.is_number_integer()) {
      range.min = range.max = value.get<int>();
    } else if (value.is_array() && value.size() == 2 && value[0].is_number_integer() &&
               value[1].is_number_integer()) {
      range.min = value[0].get<int>();
      range.max = value[1].get<int>();
    } else {
      throw ConfigError("arity of '" + name + "' must be an integer or [min, max]");
    }
    if (range.min < 0 || range.max < range.min) {
      throw ConfigError("arity of '" + name + "' is not a valid range");
    }
    out[name] = range;
  }
  return out;
}

std::vector<TaxonomyRule> parse_rules(const json& doc) {
  const json& rules = doc.is_object() ? doc.at("rules") : doc;
  if (!rules.is_array()) throw ConfigError("taxonomy rules must be an array");
  std::vector<TaxonomyRule> out;
  for (const auto& item : rules) {
    if (!item.is_object() || !item.contains("category") || !item["category"].is_string()) {
      throw ConfigError("taxonomy rule without a category");
    }
    TaxonomyRule rule;
    rule.category = item["category"].get<std::string>();
    rule.vr_specific = item.value("vrSpecific", false);
    rule.priority = item.value("priority", 1000);
    const auto signals = item.value("signals", json::array());
    for (const auto& signal : signals) {
      std::vector<std::string> group;
      if (signal.is_string()) {
        group.push_back(signal.get<std::string>());
      } else if (signal.is_array()) {
        for (const auto& s : signal) {
          if (!s.is_string()) throw ConfigError("signal of '" + rule.category + "' is not a string");
          group.push_back(s.get<std::string>());
        }
      } else {
        throw ConfigError("signal of '" + rule.category + "' must be a string or an array");
      }
      for (const auto& s : group) {
        const auto colon = s.find(':');
        const auto prefix = colon == std::string::npos ? std::string() : s.substr(0, colon);
        if (prefix != "api" && prefix != "kw" && prefix != "file" && prefix != "struct") {
          throw ConfigError("signal '" + s + "' of '" + rule.category + "' has an unknown prefix");
        }
      }
      if (!group.empty()) rule.signals.push_back(std::move(group));
    }
    out.push_back(std::move(rule));
  }
  return out;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string TaxonomyRule::main_category() const {
  const auto dot = category.find('.');
  return dot == std::string::npos ? category : category.substr(0, dot);
}

Config Config::defaults() {
  Config c;
  c.test_attributes = {"Test", "UnityTest", "TestCase", "TestCaseSource"};
  c.fixture_attributes = {"TestFixture"};
  c.setup_attributes = {"SetUp", "OneTimeSetUp", "UnitySetUp"};
  c.teardown_attributes = {"TearDown", "OneTimeTearDown", "UnityTearDown"};
  c.assertion_receivers = {"Assert", "StringAssert", "CollectionAssert", "Assume", "LogAssert"};
  c.assertion_arity = parse_arity(parse_json(embedded_assertion_arity(), "assertion arity"));
  c.engine_apis = std::set<std::string>(std::begin(kEngineApis), std::end(kEngineApis));
  c.resource_patterns.assign(std::begin(kResourcePatterns), std::end(kResourcePatterns));
  c.mock_apis = {"Substitute.For", "Mock.Of", "new Mock"};
  c.in_memory_patterns = {"MemoryStream", "StringReader", "StringWriter", ":memory:"};
  c.excluded_dirs = {"Library", "Temp", "Obj", "Bin", ".git", "Logs", "PackageCache"};
  c.exclude_globs = {"*.designer.cs", "*.Designer.cs", "*.g.cs", "*.g.i.cs"};
  c.taxonomy_rules = parse_rules(parse_json(embedded_taxonomy_rules(), "taxonomy rules"));
  return c;
}

std::set<std::string> Config::engine_identifiers() const {
  auto out = engine_apis;
  for (const auto& rule : taxonomy_rules) {
    for (const auto& group : rule.signals) {
      for (const auto& signal : group) {
        if (signal.starts_with("api:")) out.insert(signal.substr(4));
      }
    }
  }
  return out;
}

std::optional<ArityRange> Config::arity_for(std::string_view api_name, bool generic) const {
  std::string key(api_name);
  if (generic) {
    if (const auto it = assertion_arity.find(key + "<>"); it != assertion_arity.end()) {
      return it->second;
    }
  }
  if (const auto it = assertion_arity.find(key); it != assertion_arity.end()) return it->second;
  return std::nullopt;
}

Config apply_config_json(const Config& base, std::string_view json_text) {
  const auto doc = parse_json(json_text, "config");
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  Config c = base;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "testAttributes") {
        c.test_attributes = string_set(value, "testAttributes");
      } else if (key == "fixtureAttributes") {
        c.fixture_attributes = string_set(value, "fixtureAttributes");
      } else if (key == "setupAttributes") {
        c.setup_attributes = string_set(value, "setupAttributes");
      } else if (key == "teardownAttributes") {
        c.teardown_attributes = string_set(value, "teardownAttributes");
      } else if (key == "assertionReceivers") {
        c.assertion_receivers = string_set(value, "assertionReceivers");
      } else if (key == "assertionArity") {
        c.assertion_arity = parse_arity(value);
      } else if (key == "engineApis") {
        c.engine_apis = string_set(value, "engineApis");
      } else if (key == "resourcePatterns") {
        c.resource_patterns = string_list(value, "resourcePatterns");
      } else if (key == "mockApis") {
        c.mock_apis = string_list(value, "mockApis");
      } else if (key == "inMemoryPatterns") {
        c.in_memory_patterns = string_list(value, "inMemoryPatterns");
      } else if (key == "excludedDirs") {
        c.excluded_dirs = string_list(value, "excludedDirs");
      } else if (key == "excludeGlobs") {
        c.exclude_globs = string_list(value, "excludeGlobs");
      } else if (key == "eagerRequiresAssertion") {
        if (!value.is_boolean()) throw ConfigError("'eagerRequiresAssertion' must be a boolean");
        c.eager_requires_assertion = value.get<bool>();
      } else if (key == "taxonomyRules") {
        const auto mode = value.is_object() ? value.value("mode", std::string("extend"))
                                            : std::string("replace");
        auto rules = parse_rules(value);
        if (mode == "replace") {
          c.taxonomy_rules = std::move(rules);
        } else if (mode == "extend") {
          for (auto& rule : rules) {
            auto it = std::find_if(c.taxonomy_rules.begin(), c.taxonomy_rules.end(),
                                   [&](const TaxonomyRule& r) { return r.category == rule.category; });
            if (it == c.taxonomy_rules.end()) {
              c.taxonomy_rules.push_back(std::move(rule));
            } else {
              it->signals.insert(it->signals.end(), rule.signals.begin(), rule.signals.end());
            }
          }
        } else {
          throw ConfigError("taxonomyRules.mode must be 'extend' or 'replace'");
        }
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return apply_config_json(Config::defaults(), buffer.str());
}

std::vector<TaxonomyRule> parse_taxonomy_rules(std::string_view json_text) {
  try {
    return parse_rules(parse_json(json_text, "taxonomy rules"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("taxonomy rules: ") + e.what());
  }
}

}  // namespace vrtestlint
