#include "bargain/tournament.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace bargain;
namespace bt = bargain::testing;

namespace {

TournamentResults sample() {
  const auto specs = expand_matrix(bt::scripted_models(2),
                                   std::vector<Persona>{Persona::Selfish, Persona::Control}, 1, 5);
  TournamentOptions o;
  o.now = [] { return std::string("2000-01-01T00:00:00.000Z"); };
  return run_tournament(specs, o);
}

std::string header() {
  std::string h(kRoundsSchema);
  h += "\n";
  for (std::size_t i = 0; i < kRoundsColumns.size(); ++i) {
    h += (i ? "," : "") + std::string(kRoundsColumns[i]);
  }
  return h + "\n";
}

}  // namespace

TEST(RoundsCsv, RoundTrip) {
  const auto res = sample();
  const auto csv = rounds_csv(res.records);
  EXPECT_EQ(csv.rfind(header(), 0), 0u);
  EXPECT_EQ(parse_rounds_csv(csv), res.records);
}

TEST(RoundsCsv, QuotedLabelsSurvive) {
  auto res = sample();
  res.records[0].seller_model = "model with spaces";
  res.records[0].fingerprint = "";
  EXPECT_EQ(parse_rounds_csv(rounds_csv(res.records)), res.records);
}

TEST(RoundsCsv, SchemaErrors) {
  EXPECT_ERRC(parse_rounds_csv(""), Errc::SchemaMismatch);
  EXPECT_ERRC(parse_rounds_csv("round_id,seller_model\n"), Errc::SchemaMismatch);
  EXPECT_ERRC(parse_rounds_csv(std::string(kRoundsSchema) + "\nround_id,oops\n"),
              Errc::SchemaMismatch);
  EXPECT_ERRC(parse_rounds_csv("#bargain-rounds v9\n"), Errc::SchemaMismatch);
}

TEST(RoundsCsv, CorruptRowsNameTheLine) {
  const auto good = rounds_csv(sample().records);
  const auto bad_winner = header() +
                          "R000000,a,b,Control,Control,0,1,agreement,60,buyer,4,50,f\n";
  try {
    (void)parse_rounds_csv(bad_winner);
    FAIL() << "expected CorruptRow";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::CorruptRow);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_ERRC(parse_rounds_csv(header() + "R1,a,b,Control,Control,0,1,agreement,60,seller\n"),
              Errc::CorruptRow);
  EXPECT_ERRC(parse_rounds_csv(header() + "R1,a,b,Friendly,Control,0,1,rejected,,draw,2,50,f\n"),
              Errc::CorruptRow);
  EXPECT_ERRC(parse_rounds_csv(header() + "R1,a,b,Control,Control,x,1,rejected,,draw,2,50,f\n"),
              Errc::CorruptRow);
  EXPECT_ERRC(parse_rounds_csv(header() + "R1,\"a,b,Control,Control,0,1,rejected,,draw,2,50,f\n"),
              Errc::CorruptRow);
  EXPECT_ERRC(parse_rounds_csv(header() + "R1,a,b,Control,Control,0,1,rejected,40,draw,2,50,f\n"),
              Errc::CorruptRow);
}

TEST(TranscriptJsonl, RoundTripIncludingReasoning) {
  const auto res = sample();
  for (const auto& doc : res.transcripts) {
    const auto line = to_json_line(doc);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    const auto back = parse_transcript_line(line);
    EXPECT_EQ(back.record, doc.record);
    EXPECT_EQ(back.turns, doc.turns);
    EXPECT_EQ(back.config, doc.config);
    EXPECT_EQ(back.metadata, doc.metadata);
    EXPECT_NO_THROW(verify_replay(back));
  }
  EXPECT_ERRC(parse_transcript_line("{"), Errc::CorruptRow);
  EXPECT_ERRC(parse_transcript_line("{}"), Errc::CorruptRow);
}

TEST(WriteResults, WritesAllArtifacts) {
  bt::TempDir tmp;
  auto res = sample();
  res.aborts.push_back({"R000099", 99, "a", "b", Persona::Control, Persona::Selfish, 3, "boom"});
  RunManifest m;
  m.config_fingerprint = "abc";
  m.base_seed = 5;
  m.parallelism = 2;
  m.extra["note"] = "x";
  const auto dir = tmp.path() / "nested" / "out";
  write_results(dir, res, m);
  for (auto f : {"rounds.csv", "transcripts.jsonl", "aborts.log", "run_manifest.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  EXPECT_EQ(load_results(dir / "rounds.csv"), res.records);
  EXPECT_EQ(load_transcripts(dir / "transcripts.jsonl").size(), res.transcripts.size());
  const auto aborts = load_aborts(dir / "aborts.log");
  ASSERT_EQ(aborts.size(), 1u);
  EXPECT_EQ(aborts[0], res.aborts[0]);
  const auto manifest = nlohmann::json::parse(read_text_file(dir / "run_manifest.json"));
  EXPECT_EQ(manifest["parallelism"], 2);
  EXPECT_EQ(manifest["config_fingerprint"], "abc");
  EXPECT_EQ(manifest["note"], "x");
  EXPECT_EQ(manifest["rounds_aborted"], 1);
}

TEST(Storage, MissingFiles) {
  bt::TempDir tmp;
  EXPECT_ERRC(load_results(tmp.path() / "nope.csv"), Errc::StorageError);
  EXPECT_ERRC(read_text_file(tmp.path() / "nope"), Errc::StorageError);
  EXPECT_TRUE(load_aborts(tmp.path() / "aborts.log").empty());
  EXPECT_ERRC(write_text_file(tmp.path() / "nope" / "deeper" / "x", "y"), Errc::StorageError);
}

TEST(Storage, FixtureLoads) {
  const auto rows = load_results(bt::fixture_path("outcome_corpus.csv"));
  EXPECT_EQ(rows.size(), 1737u);
}
