#include "bargain/personas.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bargain/error.hpp"

namespace bargain {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, kPersonaCount> kPersonaNames{
    "Cooperative", "Competitive", "Altruistic", "Selfish", "Cunning", "Desperate", "Control",
};

constexpr std::array<std::string_view, 5> kDimensionNames{
    "Openness", "Conscientiousness", "Extraversion", "Agreeableness", "Neuroticism",
};

PersonaSpec make(Persona name, std::vector<TraitMarker> traits, std::string summary,
                 std::vector<std::string> variants) {
  return PersonaSpec{name, std::move(traits), std::move(variants), std::move(summary)};
}

std::array<PersonaSpec, kPersonaCount> builtin_specs() {
  using enum BigFive;
  using enum TraitLevel;
  return {
      make(Persona::Cooperative, {{Agreeableness, High}, {Openness, High}},
           "Looks for a fair deal that leaves both sides satisfied.",
           {
               "Your goal is an agreement that works for both parties. Avoid needless "
               "conflict and look for terms the other side can also be happy with.",
               "You are warm, agreeable and open-minded. You listen to the other party's "
               "position and value understanding over persuasion.",
               "Acknowledge the other side's concerns, answer reasonable requests with "
               "reasonable concessions, and build trust as the conversation goes on.",
           }),
      make(Persona::Competitive, {{Agreeableness, Low}, {Extraversion, High}},
           "Pushes hard and early to come out ahead.",
           {
               "Your goal is to come out ahead of the other party. Treat the negotiation "
               "as a contest and secure the best terms you can for yourself.",
               "You are assertive, outspoken and not especially concerned with being liked. "
               "You take the initiative rather than waiting for the other side.",
               "Open with an ambitious anchor, concede slowly, and press the other side to "
               "move first and move quickly.",
           }),
      make(Persona::Altruistic, {{Agreeableness, High}, {Neuroticism, High}},
           "Puts the other party's interests ahead of its own.",
           {
               "Your goal is to look after the other party's interests, even when that "
               "costs you part of your own gain.",
               "You are kind-hearted and sensitive. Even under pressure you stay considerate "
               "of how the deal affects the person across the table.",
               "Be generous with concessions and accept a less favourable deal if it "
               "helps the other side.",
           }),
      make(Persona::Selfish, {{Agreeableness, Low}, {Conscientiousness, High}},
           "Protects its own interest and ignores appeals.",
           {
               "Your goal is your own benefit. The other party's wishes matter only insofar "
               "as they help you close a good deal for yourself.",
               "You are methodical, disciplined and unmoved by emotional appeals. You "
               "decide on logic and efficiency.",
               "Do not concede anything without a concrete, rational reason, and keep "
               "every concession as small as possible.",
           }),
      make(Persona::Cunning, {{Conscientiousness, Low}, {Agreeableness, Low}},
           "Uses tricks and misdirection for a quick advantage.",
           {
               "Your goal is a short-term advantage, and you are willing to use tricks to "
               "get it.",
               "You are sly and loosely bound by rules. You are comfortable bending the "
               "truth when it serves you.",
               "Exaggerate, bluff about alternatives and use misleading claims to cloud the "
               "other party's judgement about what a fair price is.",
           }),
      make(Persona::Desperate, {{Neuroticism, High}, {Conscientiousness, Low}},
           "Plays up urgency and hardship to win sympathy.",
           {
               "Your goal is to win better terms by convincing the other party that you "
               "urgently need this deal.",
               "You are anxious and impulsive. Your emotions show plainly and your offers "
               "can be erratic.",
               "Stress your difficult situation, appeal to the other side's sympathy and "
               "make it clear how much depends on this deal.",
           }),
      make(Persona::Control, {}, "No assigned personality; the model's own behaviour.", {}),
  };
}

std::optional<BigFive> parse_dimension(std::string_view text) {
  for (std::size_t i = 0; i < kDimensionNames.size(); ++i) {
    if (kDimensionNames[i] == text) return static_cast<BigFive>(i);
  }
  return std::nullopt;
}

void check_spec(const PersonaSpec& spec, std::string_view origin) {
  const bool control = spec.name == Persona::Control;
  const std::size_t expected = control ? 0 : 3;
  if (spec.prompt_variants.size() != expected) {
    throw Error(Errc::ConfigError, std::string(origin) + ": persona " +
                                       std::string(to_string(spec.name)) + " needs " +
                                       std::to_string(expected) + " variants");
  }
  for (const auto& v : spec.prompt_variants) {
    if (v.empty()) {
      throw Error(Errc::ConfigError, std::string(origin) + ": empty prompt variant");
    }
  }
}

}  // namespace

std::string_view to_string(Persona persona) noexcept {
  return kPersonaNames[static_cast<std::size_t>(persona)];
}

std::optional<Persona> parse_persona(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kPersonaNames.size(); ++i) {
    if (kPersonaNames[i] == name) return static_cast<Persona>(i);
  }
  return std::nullopt;
}

std::string_view to_string(BigFive dimension) noexcept {
  return kDimensionNames[static_cast<std::size_t>(dimension)];
}

std::string_view to_string(TraitLevel level) noexcept {
  return level == TraitLevel::High ? "High" : "Low";
}

bool PersonaSpec::has_trait(BigFive dimension, TraitLevel level) const {
  return std::find(traits.begin(), traits.end(), TraitMarker{dimension, level}) != traits.end();
}

PersonaRegistry::PersonaRegistry(std::array<PersonaSpec, kPersonaCount> specs)
    : specs_(std::move(specs)) {}

const PersonaRegistry& PersonaRegistry::builtin() {
  static const PersonaRegistry registry(builtin_specs());
  return registry;
}

PersonaRegistry PersonaRegistry::from_directory(const std::filesystem::path& dir) {
  std::array<PersonaSpec, kPersonaCount> specs;
  for (auto persona : kAllPersonas) {
    const auto path = dir / (std::string(to_string(persona)) + ".json");
    std::ifstream in(path);
    if (!in) throw Error(Errc::ConfigError, "cannot read persona file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto spec = parse_persona_document(buffer.str());
    if (spec.name != persona) {
      throw Error(Errc::ConfigError, path.string() + " defines " +
                                         std::string(to_string(spec.name)));
    }
    specs[static_cast<std::size_t>(persona)] = std::move(spec);
  }
  return PersonaRegistry(std::move(specs));
}

const PersonaSpec& PersonaRegistry::get(Persona persona) const noexcept {
  return specs_[static_cast<std::size_t>(persona)];
}

const PersonaSpec& PersonaRegistry::get(std::string_view name) const {
  auto persona = parse_persona(name);
  if (!persona) throw Error(Errc::UnknownPersona, "'" + std::string(name) + "'");
  return get(*persona);
}

const PersonaSpec& get_persona(std::string_view name) {
  return PersonaRegistry::builtin().get(name);
}

PersonaSpec parse_persona_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("persona document: ") + e.what());
  }
  try {
    PersonaSpec spec;
    const auto name = doc.at("name").get<std::string>();
    auto persona = parse_persona(name);
    if (!persona) throw Error(Errc::ConfigError, "name: unknown persona '" + name + "'");
    spec.name = *persona;
    spec.summary = doc.value("summary", "");
    for (const auto& t : doc.at("traits")) {
      auto dim = parse_dimension(t.at("dimension").get<std::string>());
      const auto level = t.at("level").get<std::string>();
      if (!dim || (level != "High" && level != "Low")) {
        throw Error(Errc::ConfigError, "persona " + name + ": bad trait " + t.dump());
      }
      spec.traits.push_back({*dim, level == "High" ? TraitLevel::High : TraitLevel::Low});
    }
    spec.prompt_variants = doc.at("variants").get<std::vector<std::string>>();
    check_spec(spec, "persona document");
    return spec;
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("persona document: ") + e.what());
  }
}

std::string to_persona_document(const PersonaSpec& spec) {
  json doc;
  doc["name"] = std::string(to_string(spec.name));
  doc["summary"] = spec.summary;
  doc["traits"] = json::array();
  for (const auto& t : spec.traits) {
    doc["traits"].push_back(
        {{"dimension", std::string(to_string(t.dimension))},
         {"level", std::string(to_string(t.level))}});
  }
  doc["variants"] = spec.prompt_variants;
  return doc.dump(2) + "\n";
}

std::optional<PromptMode> parse_prompt_mode(std::string_view text) noexcept {
  if (text == "all") return PromptMode::AllVariants;
  if (text == "rotate") return PromptMode::Rotate;
  return std::nullopt;
}

std::string render_persona_block(const PersonaSpec& spec) {
  std::string block;
  for (const auto& variant : spec.prompt_variants) {
    if (!block.empty()) block += "\n\n";
    block += variant;
  }
  return block;
}

std::string render_persona_block(const PersonaSpec& spec, PromptMode mode,
                                 std::uint64_t rotation_index) {
  if (mode == PromptMode::AllVariants || spec.prompt_variants.empty()) {
    return render_persona_block(spec);
  }
  return spec.prompt_variants[rotation_index % spec.prompt_variants.size()];
}

}  // namespace bargain
