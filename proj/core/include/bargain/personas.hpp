#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bargain {

enum class Persona : std::uint8_t {
  Cooperative,
  Competitive,
  Altruistic,
  Selfish,
  Cunning,
  Desperate,
  Control,
};

inline constexpr std::size_t kPersonaCount = 7;

inline constexpr std::array<Persona, kPersonaCount> kAllPersonas{
    Persona::Cooperative, Persona::Competitive, Persona::Altruistic, Persona::Selfish,
    Persona::Cunning,     Persona::Desperate,   Persona::Control,
};

std::string_view to_string(Persona persona) noexcept;
std::optional<Persona> parse_persona(std::string_view name) noexcept;

enum class BigFive : std::uint8_t {
  Openness,
  Conscientiousness,
  Extraversion,
  Agreeableness,
  Neuroticism,
};

enum class TraitLevel : std::uint8_t { High, Low };

std::string_view to_string(BigFive dimension) noexcept;
std::string_view to_string(TraitLevel level) noexcept;

struct TraitMarker {
  BigFive dimension;
  TraitLevel level;

  friend bool operator==(const TraitMarker&, const TraitMarker&) = default;
};

struct PersonaSpec {
  Persona name = Persona::Control;
  std::vector<TraitMarker> traits;
  std::vector<std::string> prompt_variants;  // three entries, or none for Control
  std::string summary;

  bool has_trait(BigFive dimension, TraitLevel level) const;

  friend bool operator==(const PersonaSpec&, const PersonaSpec&) = default;
};

// Closed registry of the seven personas. Read-only after construction.
class PersonaRegistry {
 public:
  // Definitions compiled into the library.
  static const PersonaRegistry& builtin();

  // Loads `<Name>.json` for every persona from `dir`. Throws Error(ConfigError)
  // for missing or invalid files.
  static PersonaRegistry from_directory(const std::filesystem::path& dir);

  const PersonaSpec& get(Persona persona) const noexcept;
  // Throws Error(UnknownPersona).
  const PersonaSpec& get(std::string_view name) const;

  std::span<const PersonaSpec, kPersonaCount> all() const noexcept { return specs_; }

 private:
  explicit PersonaRegistry(std::array<PersonaSpec, kPersonaCount> specs);
  std::array<PersonaSpec, kPersonaCount> specs_;
};

// Looks up the builtin registry. Throws Error(UnknownPersona).
const PersonaSpec& get_persona(std::string_view name);

// Persona definition document: {"name", "summary", "traits": [{"dimension",
// "level"}], "variants": [...]}. Throws Error(ConfigError) on schema problems.
PersonaSpec parse_persona_document(std::string_view text);
std::string to_persona_document(const PersonaSpec& spec);

enum class PromptMode : std::uint8_t {
  AllVariants,  // every variant in one block
  Rotate,       // one variant, selected by a rotation index
};

std::optional<PromptMode> parse_prompt_mode(std::string_view text) noexcept;

// All variants in registry order, one paragraph each. Empty for Control.
std::string render_persona_block(const PersonaSpec& spec);
std::string render_persona_block(const PersonaSpec& spec, PromptMode mode,
                                 std::uint64_t rotation_index);

}  // namespace bargain
