#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "bargain/error.hpp"
#include "bargain/tournament.hpp"
#include "bargain/version.hpp"

namespace bargain {

namespace {

using json = nlohmann::json;

// ---- CSV ------------------------------------------------------------------

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Splits one logical CSV record; quoted fields may not span lines here since
// no column holds free text.
std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      if (!cur.empty() || was_quoted) {
        throw Error(Errc::CorruptRow, "line " + std::to_string(line_no) + ": stray quote");
      }
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      was_quoted = false;
    } else {
      if (was_quoted) {
        throw Error(Errc::CorruptRow,
                    "line " + std::to_string(line_no) + ": text after closing quote");
      }
      cur += c;
    }
  }
  if (quoted) {
    throw Error(Errc::CorruptRow, "line " + std::to_string(line_no) + ": unterminated quote");
  }
  fields.push_back(std::move(cur));
  return fields;
}

template <typename Int>
Int parse_int(const std::string& text, std::string_view column) {
  Int value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw Error(Errc::CorruptRow, std::string(column) + " is not an integer: '" + text + "'");
  }
  return value;
}

RoundRecord parse_row(const std::vector<std::string>& f) {
  RoundRecord r;
  r.round_id = f[0];
  r.seller_model = f[1];
  r.buyer_model = f[2];
  const auto persona = [](const std::string& text, std::string_view column) {
    auto p = parse_persona(text);
    if (!p) throw Error(Errc::CorruptRow, std::string(column) + " unknown persona '" + text + "'");
    return *p;
  };
  r.seller_persona = persona(f[3], "seller_persona");
  r.buyer_persona = persona(f[4], "buyer_persona");
  r.repetition = parse_int<int>(f[5], "repetition");
  r.seed = parse_int<std::uint64_t>(f[6], "seed");
  const auto reason = parse_end_reason(f[7]);
  if (!reason) throw Error(Errc::CorruptRow, "unknown end_reason '" + f[7] + "'");
  r.end_reason = *reason;
  if (!f[8].empty()) r.final_price = parse_int<int>(f[8], "final_price");
  const auto winner = parse_winner(f[9]);
  if (!winner) throw Error(Errc::CorruptRow, "unknown winner '" + f[9] + "'");
  r.winner = *winner;
  r.turns_used = parse_int<int>(f[10], "turns_used");
  r.win_baseline = parse_int<int>(f[11], "win_baseline");
  r.fingerprint = f[12];
  try {
    validate_record(r);
  } catch (const Error& e) {
    if (e.code() == Errc::InconsistentOutcome) throw Error(Errc::CorruptRow, e.what());
    throw;
  }
  return r;
}

// ---- JSON -----------------------------------------------------------------

json action_json(const Action& a) {
  json j{{"kind", to_string(a.kind)}};
  j["price"] = a.price ? json(*a.price) : json(nullptr);
  return j;
}

Action action_from(const json& j) {
  const auto kind = parse_action_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error(Errc::CorruptRow, "unknown action kind");
  const auto& price = j.at("price");
  return {*kind, price.is_null() ? std::nullopt : std::optional<int>(price.get<int>())};
}

json record_json(const RoundRecord& r) {
  return {{"round_id", r.round_id},
          {"seller_model", r.seller_model},
          {"buyer_model", r.buyer_model},
          {"seller_persona", to_string(r.seller_persona)},
          {"buyer_persona", to_string(r.buyer_persona)},
          {"repetition", r.repetition},
          {"seed", r.seed},
          {"fingerprint", r.fingerprint}};
}

template <typename Enum, typename Parse>
Enum parse_enum(const json& j, const char* key, Parse parse) {
  const auto text = j.at(key).get<std::string>();
  const auto v = parse(text);
  if (!v) throw Error(Errc::CorruptRow, std::string("unknown ") + key + " '" + text + "'");
  return *v;
}

std::string read_all(std::istream& in) {
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

const std::vector<std::string_view> kRoundsColumns = {
    "round_id",    "seller_model", "buyer_model", "seller_persona", "buyer_persona",
    "repetition",  "seed",         "end_reason",  "final_price",    "winner",
    "turns_used",  "win_baseline", "fingerprint"};

std::string rounds_csv(std::span<const RoundRecord> records) {
  std::string out(kRoundsSchema);
  out += '\n';
  for (std::size_t i = 0; i < kRoundsColumns.size(); ++i) {
    if (i) out += ',';
    out += kRoundsColumns[i];
  }
  out += '\n';
  for (const auto& r : records) {
    out += csv_field(r.round_id) + ',' + csv_field(r.seller_model) + ',' +
           csv_field(r.buyer_model) + ',' + std::string(to_string(r.seller_persona)) + ',' +
           std::string(to_string(r.buyer_persona)) + ',' + std::to_string(r.repetition) + ',' +
           std::to_string(r.seed) + ',' + std::string(to_string(r.end_reason)) + ',' +
           (r.final_price ? std::to_string(*r.final_price) : std::string()) + ',' +
           std::string(to_string(r.winner)) + ',' + std::to_string(r.turns_used) + ',' +
           std::to_string(r.win_baseline) + ',' + csv_field(r.fingerprint) + '\n';
  }
  return out;
}

std::vector<RoundRecord> parse_rounds_csv(std::string_view text) {
  std::vector<RoundRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_schema = false;
  bool saw_header = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (!saw_schema) {
      if (line != kRoundsSchema) {
        throw Error(Errc::SchemaMismatch, "line 1: expected '" + std::string(kRoundsSchema) +
                                              "', found '" + std::string(line) + "'");
      }
      saw_schema = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_csv(line, line_no);
    if (!saw_header) {
      if (fields.size() != kRoundsColumns.size() ||
          !std::equal(fields.begin(), fields.end(), kRoundsColumns.begin())) {
        throw Error(Errc::SchemaMismatch,
                    "line " + std::to_string(line_no) + ": unexpected column header");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() != kRoundsColumns.size()) {
      throw Error(Errc::CorruptRow, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(kRoundsColumns.size()) + " fields, found " +
                                        std::to_string(fields.size()));
    }
    try {
      records.push_back(parse_row(fields));
    } catch (const Error& e) {
      throw Error(Errc::CorruptRow, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!saw_schema) throw Error(Errc::SchemaMismatch, "empty file: no schema line");
  if (!saw_header) throw Error(Errc::SchemaMismatch, "missing column header");
  return records;
}

std::vector<RoundRecord> load_results(const std::filesystem::path& path) {
  return parse_rounds_csv(read_text_file(path));
}

std::string to_json_line(const TranscriptDocument& doc) {
  const auto& c = doc.config;
  json turns = json::array();
  for (const auto& t : doc.turns) {
    turns.push_back({{"turn", t.turn_index},
                     {"actor", to_string(t.actor)},
                     {"reasoning", t.reasoning},
                     {"message", t.message},
                     {"action", action_json(t.action)}});
  }
  const auto& r = doc.record;
  json j{
      {"round", record_json(r)},
      {"config",
       {{"item_name", c.item_name},
        {"currency_name", c.currency_name},
        {"seller_cost", c.seller_cost},
        {"buyer_limit", c.buyer_limit},
        {"win_baseline", c.win_baseline},
        {"max_turns", c.max_turns},
        {"price_min", c.price_min},
        {"price_max", c.price_max}}},
      {"turns", std::move(turns)},
      {"outcome",
       {{"end_reason", to_string(r.end_reason)},
        {"final_price", r.final_price ? json(*r.final_price) : json(nullptr)},
        {"winner", to_string(r.winner)},
        {"turns_used", r.turns_used}}},
      {"started_at", doc.started_at},
      {"finished_at", doc.finished_at},
      {"metadata", doc.metadata},
  };
  return j.dump();
}

TranscriptDocument parse_transcript_line(std::string_view line) {
  try {
    const auto j = json::parse(line);
    TranscriptDocument doc;
    const auto& rj = j.at("round");
    auto& r = doc.record;
    r.round_id = rj.at("round_id").get<std::string>();
    r.seller_model = rj.at("seller_model").get<std::string>();
    r.buyer_model = rj.at("buyer_model").get<std::string>();
    r.seller_persona = parse_enum<Persona>(rj, "seller_persona", parse_persona);
    r.buyer_persona = parse_enum<Persona>(rj, "buyer_persona", parse_persona);
    r.repetition = rj.at("repetition").get<int>();
    r.seed = rj.at("seed").get<std::uint64_t>();
    r.fingerprint = rj.at("fingerprint").get<std::string>();

    const auto& cj = j.at("config");
    auto& c = doc.config;
    c.item_name = cj.at("item_name").get<std::string>();
    c.currency_name = cj.at("currency_name").get<std::string>();
    c.seller_cost = cj.at("seller_cost").get<int>();
    c.buyer_limit = cj.at("buyer_limit").get<int>();
    c.win_baseline = cj.at("win_baseline").get<int>();
    c.max_turns = cj.at("max_turns").get<int>();
    c.price_min = cj.at("price_min").get<int>();
    c.price_max = cj.at("price_max").get<int>();
    r.win_baseline = c.win_baseline;

    for (const auto& tj : j.at("turns")) {
      TurnRecord t;
      t.turn_index = tj.at("turn").get<int>();
      t.actor = parse_enum<Role>(tj, "actor", parse_role);
      t.reasoning = tj.at("reasoning").get<std::string>();
      t.message = tj.at("message").get<std::string>();
      t.action = action_from(tj.at("action"));
      doc.turns.push_back(std::move(t));
    }

    const auto& oj = j.at("outcome");
    r.end_reason = parse_enum<EndReason>(oj, "end_reason", parse_end_reason);
    if (!oj.at("final_price").is_null()) r.final_price = oj.at("final_price").get<int>();
    r.winner = parse_enum<Winner>(oj, "winner", parse_winner);
    r.turns_used = oj.at("turns_used").get<int>();

    doc.started_at = j.value("started_at", "");
    doc.finished_at = j.value("finished_at", "");
    if (j.contains("metadata")) {
      doc.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    }
    return doc;
  } catch (const json::exception& e) {
    throw Error(Errc::CorruptRow, std::string("transcript: ") + e.what());
  }
}

std::vector<TranscriptDocument> load_transcripts(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  std::vector<TranscriptDocument> docs;
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      docs.push_back(parse_transcript_line(line));
    } catch (const Error& e) {
      throw Error(Errc::CorruptRow, path.string() + ":" + std::to_string(line_no) + ": " +
                                        e.what());
    }
  }
  return docs;
}

std::string to_json_line(const AbortEntry& a) {
  return json{{"round_id", a.round_id},
              {"spec_index", a.spec_index},
              {"seller_model", a.seller_model},
              {"buyer_model", a.buyer_model},
              {"seller_persona", to_string(a.seller_persona)},
              {"buyer_persona", to_string(a.buyer_persona)},
              {"seed", a.seed},
              {"error", a.error}}
      .dump();
}

AbortEntry parse_abort_line(std::string_view line) {
  try {
    const auto j = json::parse(line);
    AbortEntry a;
    a.round_id = j.at("round_id").get<std::string>();
    a.spec_index = j.at("spec_index").get<std::size_t>();
    a.seller_model = j.at("seller_model").get<std::string>();
    a.buyer_model = j.at("buyer_model").get<std::string>();
    a.seller_persona = parse_enum<Persona>(j, "seller_persona", parse_persona);
    a.buyer_persona = parse_enum<Persona>(j, "buyer_persona", parse_persona);
    a.seed = j.at("seed").get<std::uint64_t>();
    a.error = j.at("error").get<std::string>();
    return a;
  } catch (const json::exception& e) {
    throw Error(Errc::CorruptRow, std::string("abort entry: ") + e.what());
  }
}

std::vector<AbortEntry> load_aborts(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return {};
  std::vector<AbortEntry> out;
  std::istringstream in(read_text_file(path));
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_abort_line(line));
    } catch (const Error& e) {
      throw Error(Errc::CorruptRow, path.string() + ":" + std::to_string(line_no) + ": " +
                                        e.what());
    }
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::StorageError, "cannot open " + path.string());
  auto text = read_all(in);
  if (in.bad()) throw Error(Errc::StorageError, "read failed: " + path.string());
  return text;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::StorageError, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw Error(Errc::StorageError, "write failed: " + path.string());
}

void write_results(const std::filesystem::path& dir, const TournamentResults& results,
                   const RunManifest& manifest) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::StorageError, "cannot create " + dir.string() + ": " + ec.message());

  write_text_file(dir / "rounds.csv", rounds_csv(results.records));

  std::string transcripts;
  for (const auto& doc : results.transcripts) transcripts += to_json_line(doc) + '\n';
  write_text_file(dir / "transcripts.jsonl", transcripts);

  std::string aborts;
  for (const auto& a : results.aborts) aborts += to_json_line(a) + '\n';
  write_text_file(dir / "aborts.log", aborts);

  json m{{"code_version", kVersion},
         {"config_fingerprint", manifest.config_fingerprint},
         {"started_at", manifest.started_at},
         {"finished_at", manifest.finished_at},
         {"base_seed", manifest.base_seed},
         {"parallelism", manifest.parallelism},
         {"rounds_completed", results.records.size()},
         {"rounds_aborted", results.aborts.size()},
         {"rounds_schema", kRoundsSchema}};
  for (const auto& [k, v] : manifest.extra) m[k] = v;
  write_text_file(dir / "run_manifest.json", m.dump(2) + '\n');
}

}  // namespace bargain
