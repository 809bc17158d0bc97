#include "bargain/personas.hpp"

#include <fstream>

#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace bargain;
namespace bt = bargain::testing;

TEST(Personas, RegistryHasSevenInOrder) {
  const auto& reg = PersonaRegistry::builtin();
  ASSERT_EQ(reg.all().size(), 7u);
  for (std::size_t i = 0; i < kPersonaCount; ++i) EXPECT_EQ(reg.all()[i].name, kAllPersonas[i]);
}

TEST(Personas, LookupByName) {
  EXPECT_EQ(get_persona("Competitive").name, Persona::Competitive);
  EXPECT_ERRC(get_persona("Friendly"), Errc::UnknownPersona);
  EXPECT_ERRC(PersonaRegistry::builtin().get("competitive "), Errc::UnknownPersona);
}

TEST(Personas, NamesRoundTrip) {
  for (auto p : kAllPersonas) EXPECT_EQ(parse_persona(to_string(p)), p);
  EXPECT_FALSE(parse_persona("Nobody"));
}

TEST(Personas, ControlHasNoPromptBlock) {
  EXPECT_TRUE(render_persona_block(get_persona("Control")).empty());
  for (auto p : kAllPersonas) {
    if (p == Persona::Control) continue;
    EXPECT_FALSE(render_persona_block(PersonaRegistry::builtin().get(p)).empty()) << to_string(p);
  }
}

TEST(Personas, RotateModeCyclesVariants) {
  const auto& spec = get_persona("Competitive");
  ASSERT_GE(spec.prompt_variants.size(), 2u);
  const auto a = render_persona_block(spec, PromptMode::Rotate, 0);
  const auto b = render_persona_block(spec, PromptMode::Rotate, 1);
  const auto wrap = render_persona_block(spec, PromptMode::Rotate, spec.prompt_variants.size());
  EXPECT_NE(a, b);
  EXPECT_EQ(a, wrap);
  EXPECT_EQ(render_persona_block(spec, PromptMode::AllVariants, 7), render_persona_block(spec));
}

TEST(Personas, DocumentRoundTrip) {
  for (const auto& spec : PersonaRegistry::builtin().all()) {
    EXPECT_EQ(parse_persona_document(to_persona_document(spec)), spec) << to_string(spec.name);
  }
}

TEST(Personas, DocumentSchemaErrors) {
  EXPECT_ERRC(parse_persona_document("not json"), Errc::ConfigError);
  EXPECT_ERRC(parse_persona_document(R"({"name": "Friendly", "summary": "", "traits": [],
                                         "variants": []})"),
              Errc::ConfigError);
}

TEST(Personas, ShippedFilesMatchBuiltin) {
  const auto loaded = PersonaRegistry::from_directory(BARGAIN_PERSONA_DIR);
  for (std::size_t i = 0; i < kPersonaCount; ++i) {
    EXPECT_EQ(loaded.all()[i], PersonaRegistry::builtin().all()[i]);
  }
}

TEST(Personas, MissingDirectoryIsConfigError) {
  bt::TempDir tmp;
  EXPECT_ERRC(PersonaRegistry::from_directory(tmp.path()), Errc::ConfigError);
}
