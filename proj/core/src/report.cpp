#include "bargain/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "bargain/error.hpp"
#include "bargain/version.hpp"

namespace bargain {

namespace {

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string key_header(Grouping g) {
  switch (g) {
    case Grouping::Winner: return "winner";
    case Grouping::SellerModel: return "seller_model";
    case Grouping::BuyerModel: return "buyer_model";
    case Grouping::SellerPersona: return "seller_persona";
    case Grouping::BuyerPersona: return "buyer_persona";
    case Grouping::PersonaPair: return "seller_persona,buyer_persona";
  }
  return "key";
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string lpad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string signed_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.*f", digits, v);
  return buf;
}

void text_table(std::ostringstream& s, const std::string& title, const AggregateTable& t) {
  s << title << "\n";
  if (t.grouping == Grouping::Winner) {
    s << "  " << pad("winner", 10) << lpad("rounds", 8) << lpad("rate", 10)
      << lpad("avg_price", 12) << "\n";
    for (std::size_t i = 0; i < t.groups.size(); ++i) {
      const auto& g = t.groups[i];
      s << "  " << pad(g.key[0], 10) << lpad(std::to_string(g.total), 8)
        << lpad(format_fixed(t.share(i)), 10)
        << lpad(g.avg_sale_price() ? format_fixed(g.avg_sale_price()) : "-", 12) << "\n";
    }
  } else {
    std::size_t width = 14;
    for (const auto& g : t.groups) width = std::max(width, join(g.key, '/').size() + 2);
    s << "  " << pad("group", width) << lpad("rounds", 8) << lpad("wins", 7)
      << lpad("draws", 7) << lpad("win_rate", 10) << lpad("draw_rate", 11)
      << lpad("avg_price", 11) << "\n";
    for (const auto& g : t.groups) {
      s << "  " << pad(join(g.key, '/'), width) << lpad(std::to_string(g.total), 8)
        << lpad(std::to_string(g.wins), 7) << lpad(std::to_string(g.draws), 7)
        << lpad(format_fixed(g.win_rate()), 10) << lpad(format_fixed(g.draw_rate()), 11)
        << lpad(g.avg_sale_price() ? format_fixed(g.avg_sale_price()) : "-", 11) << "\n";
    }
  }
  s << "\n";
}

nlohmann::json gbt_json(const GbtParams& p) {
  return {{"n_trees", p.n_trees},
          {"max_depth", p.max_depth},
          {"learning_rate", p.learning_rate},
          {"min_samples_leaf", p.min_samples_leaf}};
}

}  // namespace

std::string format_fixed(std::optional<double> value, int digits) {
  if (!value) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, *value);
  return buf;
}

AnalysisReport analyze_rounds(std::span<const RoundRecord> records,
                              const AnalysisOptions& options) {
  if (records.empty()) throw Error(Errc::EmptyInput, "no rounds to analyze");
  AnalysisReport r;
  r.rounds = records.size();
  r.overall = aggregate(records, Grouping::Winner);
  r.seller_models = aggregate(records, Grouping::SellerModel);
  r.buyer_models = aggregate(records, Grouping::BuyerModel);
  r.seller_personas = aggregate(records, Grouping::SellerPersona);
  r.buyer_personas = aggregate(records, Grouping::BuyerPersona);
  r.persona_pairs = aggregate(records, Grouping::PersonaPair);
  r.heatmap = pivot_heatmap(records);
  if (!options.attribution) return r;

  try {
    r.fit = fit_attribution(records, options.gbt);
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateData) throw;
    r.warnings.push_back(std::string("attribution skipped: ") + e.what());
    return r;
  }
  r.seller_shap = persona_mean_shap(*r.fit, Role::Seller);
  r.buyer_shap = persona_mean_shap(*r.fit, Role::Buyer);
  try {
    r.ranges = persona_influence_ranges(*r.fit);
  } catch (const Error& e) {
    if (e.code() != Errc::ModelMissingRole) throw;
    r.warnings.push_back(std::string("model influence ranges skipped: ") + e.what());
  }
  return r;
}

std::string table_csv(const AggregateTable& t) {
  std::string out = key_header(t.grouping);
  if (t.grouping == Grouping::Winner) {
    out += ",rounds,rate,priced_rounds,avg_sale_price\n";
    for (std::size_t i = 0; i < t.groups.size(); ++i) {
      const auto& g = t.groups[i];
      out += g.key[0] + ',' + std::to_string(g.total) + ',' + format_fixed(t.share(i)) + ',' +
             std::to_string(g.priced) + ',' + format_fixed(g.avg_sale_price()) + '\n';
    }
    return out;
  }
  out += ",rounds,wins,draws,losses,win_rate,draw_rate,priced_rounds,avg_sale_price\n";
  for (const auto& g : t.groups) {
    out += join(g.key, ',') + ',' + std::to_string(g.total) + ',' + std::to_string(g.wins) + ',' +
           std::to_string(g.draws) + ',' + std::to_string(g.losses) + ',' +
           format_fixed(g.win_rate()) + ',' + format_fixed(g.draw_rate()) + ',' +
           std::to_string(g.priced) + ',' + format_fixed(g.avg_sale_price()) + '\n';
  }
  return out;
}

std::string heatmap_csv(const Heatmap& h) {
  std::string out = "seller_persona,buyer_persona,present,rounds,seller_win_rate,avg_sale_price\n";
  for (auto s : kAllPersonas) {
    for (auto b : kAllPersonas) {
      const auto& c = h.at(s, b);
      out += std::string(to_string(s)) + ',' + std::string(to_string(b)) + ',' +
             (c.present() ? "1" : "0") + ',' + std::to_string(c.total) + ',' +
             format_fixed(c.seller_win_rate()) + ',' + format_fixed(c.avg_sale_price()) + '\n';
    }
  }
  return out;
}

std::string attribution_csv(const AnalysisReport& r) {
  std::string out = "table,role,key,rows,value\n";
  if (!r.fit) return out;
  out += "base_value,,," + std::to_string(r.fit->encoded.rows.size()) + ',' +
         format_fixed(r.fit->base_value) + '\n';
  for (const auto& [role, rows] :
       {std::pair{"seller", &r.seller_shap}, std::pair{"buyer", &r.buyer_shap}}) {
    for (const auto& p : *rows) {
      out += std::string("persona_mean_shap,") + role + ',' + std::string(to_string(p.persona)) +
             ',' + std::to_string(p.rows) + ',' + format_fixed(p.mean_shap) + '\n';
    }
  }
  if (r.ranges) {
    for (const auto& m : *r.ranges) {
      out += "model_range,seller," + m.model + ',' + std::to_string(m.seller_rows) + ',' +
             format_fixed(m.seller_range) + '\n';
      out += "model_range,buyer," + m.model + ',' + std::to_string(m.buyer_rows) + ',' +
             format_fixed(m.buyer_range) + '\n';
      out += "model_range,total," + m.model + ',' +
             std::to_string(m.seller_rows + m.buyer_rows) + ',' + format_fixed(m.total_range) +
             '\n';
    }
  }
  return out;
}

std::string render_text_report(const AnalysisReport& r, const AnalysisOptions& options) {
  std::ostringstream s;
  s << "Negotiation analysis (" << r.rounds << " rounds)\n\n";
  text_table(s, "Overall outcomes", r.overall);
  text_table(s, "Seller role by model", r.seller_models);
  text_table(s, "Buyer role by model", r.buyer_models);
  text_table(s, "Seller role by persona", r.seller_personas);
  text_table(s, "Buyer role by persona", r.buyer_personas);

  s << "Persona pairing (seller win rate / avg price; rows: seller, columns: buyer)\n  "
    << pad("", 13);
  for (auto b : kAllPersonas) s << lpad(std::string(to_string(b)), 14);
  s << "\n";
  for (auto sp : kAllPersonas) {
    s << "  " << pad(std::string(to_string(sp)), 13);
    for (auto bp : kAllPersonas) {
      const auto& c = r.heatmap.at(sp, bp);
      if (!c.present()) {
        s << lpad("-", 14);
        continue;
      }
      const auto price = c.avg_sale_price();
      s << lpad(format_fixed(c.seller_win_rate(), 2) + "/" + (price ? format_fixed(price, 1) : "-"),
                14);
    }
    s << "\n";
  }
  s << "\n";

  if (r.fit) {
    const auto& p = options.gbt;
    s << "Price model: " << r.fit->model.trees.size() << " trees (max " << p.n_trees
      << "), depth " << p.max_depth << ", learning rate " << p.learning_rate
      << ", min leaf " << p.min_samples_leaf << ", " << r.fit->encoded.rows.size()
      << " agreement rounds\n";
    s << "Base value: " << format_fixed(r.fit->base_value) << "\n\n";
    for (const auto& [title, rows] : {std::pair{"Mean Shapley value by seller persona", &r.seller_shap},
                                      std::pair{"Mean Shapley value by buyer persona", &r.buyer_shap}}) {
      s << title << "\n";
      for (const auto& ps : *rows) {
        s << "  " << pad(std::string(to_string(ps.persona)), 13)
          << lpad(signed_fixed(ps.mean_shap, 2), 9) << "  (" << ps.rows << " rounds)\n";
      }
      s << "\n";
    }
    if (r.ranges) {
      std::size_t width = 14;
      for (const auto& m : *r.ranges) width = std::max(width, m.model.size() + 2);
      s << "Persona influence range by model\n  " << pad("model", width) << lpad("seller", 9)
        << lpad("buyer", 9) << lpad("total", 9) << "\n";
      for (const auto& m : *r.ranges) {
        s << "  " << pad(m.model, width) << lpad(format_fixed(m.seller_range, 2), 9)
          << lpad(format_fixed(m.buyer_range, 2), 9) << lpad(format_fixed(m.total_range, 2), 9)
          << "\n";
      }
      s << "\n";
    }
  }
  for (const auto& w : r.warnings) s << "warning: " << w << "\n";
  return s.str();
}

void write_report(const std::filesystem::path& dir, const AnalysisReport& r,
                  const AnalysisOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "tables", ec);
  if (ec) throw Error(Errc::StorageError, "cannot create " + dir.string() + ": " + ec.message());

  write_text_file(dir / "tables" / "overall.csv", table_csv(r.overall));
  write_text_file(dir / "tables" / "seller_models.csv", table_csv(r.seller_models));
  write_text_file(dir / "tables" / "buyer_models.csv", table_csv(r.buyer_models));
  write_text_file(dir / "tables" / "seller_personas.csv", table_csv(r.seller_personas));
  write_text_file(dir / "tables" / "buyer_personas.csv", table_csv(r.buyer_personas));
  write_text_file(dir / "tables" / "persona_pairs.csv", table_csv(r.persona_pairs));
  write_text_file(dir / "heatmap.csv", heatmap_csv(r.heatmap));
  write_text_file(dir / "attribution.csv", attribution_csv(r));
  write_text_file(dir / "report.txt", render_text_report(r, options));

  nlohmann::json m{{"code_version", kVersion},
                   {"rounds", r.rounds},
                   {"attribution", options.attribution},
                   {"gbt", gbt_json(options.gbt)},
                   {"warnings", r.warnings}};
  if (r.fit) {
    m["agreement_rounds"] = r.fit->encoded.rows.size();
    m["trees_fitted"] = r.fit->model.trees.size();
    m["model_dictionary"] = r.fit->encoded.dictionary.models;
    m["features"] = {"seller_model", "buyer_model", "seller_persona", "buyer_persona"};
  }
  write_text_file(dir / "report_manifest.json", m.dump(2) + '\n');
}

}  // namespace bargain
