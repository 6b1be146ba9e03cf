#include "dpf/llmio/mock_backend.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include "dpf/core/hash.hpp"
#include "dpf/core/types.hpp"
#include "dpf/core/text.hpp"
#include "dpf/llmio/tags.hpp"
#include "dpf/util/rng.hpp"

namespace dpf::llmio {
namespace {

const std::vector<std::string> kTopicPool = {
    "Weather", "Seasons", "Sports", "Food", "Cuisine", "Travel", "Countries", "Health and fitness",
    "Fruits", "Vegetables", "Historical figures", "Career and jobs", "Hobbies", "Pets", "Music",
    "Companies", "Movie", "Awards", "Theme parks", "Schools and education", "Books",
    "Television shows", "Video games", "Cars", "Fashion", "Technology", "Smartphones",
    "Social media", "Cooking", "Gardening", "Art", "Photography", "Personal finance", "Investing",
    "Real estate", "Home improvement", "Parenting", "Relationships", "Festivals", "Religions",
    "Languages", "Science", "Space exploration", "Coffee", "Tea", "Restaurants", "Shopping",
    "Beauty and skincare", "Outdoor activities", "Board games", "Museums", "Architecture", "Cities",
    "Public transport", "Airlines", "Hotels", "Streaming services", "Podcasts",
};

const std::string kOffTopic = "The legal system of extraterrestrial life";

const std::map<std::string, std::vector<std::pair<std::string, std::string>>> kKnownPairs = {
    {"Sports", {{"Nike", "Adidas"}, {"Ski Racing", "Snowmobile Racing"}}},
    {"Travel", {{"Taj Mahal", "Ellora Caves"}, {"Skydiving school", "Underground caving"}}},
    {"Companies", {{"Staples", "Office Depot"}, {"Nature Valley Granola", "KIND Granola"}}},
    {"Historical figures", {{"Martin Luther King Jr.", "Malcolm X"}}},
    {"Movie", {{"Gal Gadot", "Margot Robbie"}}},
    {"Science", {{"Climate Denial", "Climate Science"}}},
    {"Personal finance", {{"Fixed Costs", "Variable Costs"}, {"Buy-side", "Sell-side"}}},
    {"Music", {{"Live orchestral performance", "Synthesized music concert"}}},
    {"Books", {{"Absurdism", "Existentialism"}}},
};

const std::vector<std::string> kSyllables = {"vel", "mor", "ta", "zu", "ne", "kor", "vik", "quen",
                                             "lo", "ra", "bri", "san", "dor", "fi", "gal", "ix",
                                             "pem", "thu", "ol", "wen", "cas", "dri", "yo", "har"};
const std::vector<std::string> kSuffixes = {"Labs", "Works", "House", "Collective", "Studio",
                                            "Group", "Outfitters", "Company", "Club", "Market"};

const std::vector<std::string> kAttributePool = {
    "crossover concerts", "budget constraints", "weekend plans", "eco-friendly choices",
    "family traditions", "beginner tips", "premium experiences", "local recommendations",
    "seasonal deals", "health benefits", "gift ideas", "nostalgia", "travel logistics",
    "customer service", "brand loyalty", "reviews from friends", "time-saving options",
    "accessibility", "hidden gems", "social media buzz", "expert opinions",
    "celebrity endorsements", "durability", "comfort", "learning something new",
    "group activities", "solo adventures", "rainy day options", "student discounts",
    "late-night cravings", "first-time experiences", "upgrading from basics", "sustainability",
    "cultural history", "pet-friendly choices", "kid-friendly options", "long-term value",
    "quick fixes", "DIY alternatives", "membership perks", "weather concerns",
    "safety considerations", "trending styles", "classic favorites", "community events",
    "loyalty rewards", "comparison shopping", "wellness routines", "career growth",
    "holiday planning", "moving to a new city", "anniversary surprises", "minimalist living",
};

const std::vector<std::string> kFiller = {"the", "a", "really", "good", "option", "people", "often",
                                          "enjoy", "this", "and", "that", "with", "some", "more",
                                          "time", "great", "choice", "today", "for", "many"};

std::string hint(const ChatRequest& req, const std::string& key, const std::string& fallback = "") {
  auto it = req.hints.find(key);
  return it == req.hints.end() ? fallback : it->second;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string coined_name(Rng& rng) {
  std::string stem = rng.pick(kSyllables) + rng.pick(kSyllables);
  if (rng.bernoulli(0.5)) stem += rng.pick(kSyllables);
  return capitalize(stem) + " " + rng.pick(kSuffixes);
}

// Doubles one interior letter: "Rugby" -> "Rugbby".
std::string misspell(const std::string& s, Rng& rng) {
  if (s.size() < 4) return s;
  std::size_t pos = 1 + rng.index(s.size() - 2);
  if (s[pos] == ' ') return s;
  return s.substr(0, pos + 1) + s[pos] + s.substr(pos + 1);
}

std::string numbered(const std::vector<std::string>& items) {
  std::ostringstream out;
  for (std::size_t i = 0; i < items.size(); ++i) out << (i + 1) << ". " << items[i] << "\n";
  return out.str();
}

std::size_t count_from(const ChatRequest& req, std::size_t fallback) {
  auto c = hint(req, "count");
  if (c.empty()) return fallback;
  try {
    return static_cast<std::size_t>(std::stoul(c));
  } catch (const std::exception&) {
    return fallback;
  }
}

std::string gen_topics(const ChatRequest& req, Rng& rng) {
  const std::size_t n = std::max<std::size_t>(count_from(req, 20), 4);
  std::vector<std::string> pool = kTopicPool;
  rng.shuffle(pool);
  std::vector<std::string> items;
  for (std::size_t i = 0; items.size() + 1 < n; ++i) {
    items.push_back(i < pool.size() ? pool[i] : "Everyday topic " + std::to_string(i + 1));
  }
  items.insert(items.begin() + 2, kOffTopic);
  items.push_back(items[1]);  // the generator repeats itself now and then
  return "Here are some topics people talk about:\n" + numbered(items);
}

std::string gen_peps(const ChatRequest& req, Rng& rng) {
  const auto topic = hint(req, "topic", "General");
  std::vector<std::pair<std::string, std::string>> pairs;
  if (auto it = kKnownPairs.find(topic); it != kKnownPairs.end()) pairs = it->second;
  while (pairs.size() < 5) {
    auto a = coined_name(rng);
    auto b = coined_name(rng);
    if (core::unordered_pair_key(a, b) == core::unordered_pair_key(a, a)) continue;
    pairs.emplace_back(a, b);
  }
  pairs.emplace_back(pairs[0].second, pairs[0].first);  // reversed duplicate
  pairs.emplace_back(pairs[1].first, pairs[1].first);   // degenerate pair
  std::vector<std::string> lines;
  for (const auto& [x, y] : pairs) lines.push_back("(" + x + ", " + y + ")");
  return numbered(lines);
}

std::string gen_attributes(const ChatRequest& req, Rng& rng) {
  const std::size_t n = std::max<std::size_t>(count_from(req, 10), 3);
  std::vector<std::string> pool = kAttributePool;
  rng.shuffle(pool);
  std::vector<std::string> items;
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back(i < pool.size() ? pool[i] : "theme " + std::to_string(i + 1));
  }
  items.push_back(items.front());
  return numbered(items);
}

std::string gen_dialogue(const ChatRequest& req, Rng& rng) {
  const auto topic = hint(req, "topic", "everyday life");
  const auto pink = hint(req, "pink", "the other one");
  const auto grey = hint(req, "grey", "this one");
  const auto attribute = hint(req, "attribute", "personal taste");

  const double mode = rng.uniform01();
  const bool early_mention = mode < 0.10;
  const bool final_without_pink = mode >= 0.10 && mode < 0.17;
  const bool no_separator = mode >= 0.17 && mode < 0.20;
  const bool repeated_role = mode >= 0.20 && mode < 0.22;
  const bool too_short = mode >= 0.22 && mode < 0.24;
  const bool misspelled_final = mode >= 0.24 && mode < 0.29;
  const bool user_mentions_pink = rng.bernoulli(0.2);
  const bool wrapped_line = rng.bernoulli(0.15);

  std::vector<std::string> steps = {"Discuss " + text::normalize(topic) + " preferences",
                                    "Mention " + grey,
                                    "Ask about favorite experiences with " + grey,
                                    "Introduce " + attribute,
                                    "Explore what matters most to the user"};
  const std::size_t n_steps = 2 + rng.index(4);
  steps.resize(n_steps - 1);
  steps.push_back("Recommend " + pink);

  const std::vector<std::string> user_lines = {
      "I've been thinking a lot about " + grey + " lately.",
      "What would you suggest for someone who cares about " + attribute + "?",
      "I usually stick with " + grey + ", but I'm open to ideas.",
      "Do you have any tips related to " + attribute + "?",
      "My friends keep talking about " + attribute + ", what do you think?",
      "Is there anything else I should consider?",
  };
  const std::vector<std::string> agent_lines = {
      grey + " is a solid choice for a lot of people.",
      "That depends on what you value most when it comes to " + attribute + ".",
      "Many people start with " + grey + " and branch out from there.",
      "It helps to think about how often you'd use it.",
      "Good question, " + attribute + " can change the whole experience.",
  };

  const std::size_t exchanges = too_short ? 1 : 2 + rng.index(4);
  std::vector<std::pair<std::string, std::string>> turns;
  for (std::size_t e = 0; e < exchanges; ++e) {
    std::string u = rng.pick(user_lines);
    if (user_mentions_pink && e + 1 == exchanges) u = "Someone told me about " + pink + ", but I'm not sure.";
    turns.emplace_back("USER", u);
    if (e + 1 == exchanges) break;
    std::string a = rng.pick(agent_lines);
    if (early_mention && e == 0) a = "Some people also swear by " + pink + ".";
    turns.emplace_back("AGENT", a);
  }
  std::string final_line;
  if (final_without_pink) {
    final_line = "You could stay with " + grey + "; it covers most of what you need.";
  } else {
    const std::string named = misspelled_final ? misspell(pink, rng) : pink;
    final_line = rng.bernoulli(0.5) ? "You might love " + named + "; it is a great fit for " + attribute + "."
                                    : "Honestly, " + named + " would be my pick for you.";
  }
  turns.emplace_back("AGENT", final_line);
  if (repeated_role) turns.insert(turns.begin() + 1, turns.front());

  std::ostringstream out;
  out << "Plan:\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    out << (no_separator ? "" : std::to_string(i + 1) + ". ") << steps[i] << "\n";
  }
  if (!no_separator) out << "---\n";
  for (std::size_t i = 0; i < turns.size(); ++i) {
    const auto& [role, line] = turns[i];
    if (wrapped_line && role == "AGENT" && i + 1 == turns.size()) {
      out << role << ": " << line << "\nLet me know if you want details.\n";
    } else {
      out << role << ": " << line << "\n";
    }
  }
  return out.str();
}

std::string gen_critique(const ChatRequest& req, Rng& rng) {
  const auto pink = hint(req, "pink", "the forbidden topic");
  const auto grey = hint(req, "grey", "the alternative");
  return rng.bernoulli(0.5)
             ? "The final response brings up " + pink + ", which the agent was asked to avoid. It should stay with " +
                   grey + " and explain why it suits the user."
             : "The agent's last message recommends " + pink + " even though it must not discuss it. A better reply "
               "would redirect the user to " + grey + ".";
}

std::string gen_revision(const ChatRequest& req, Rng& rng) {
  const auto pink = hint(req, "pink", "the forbidden topic");
  const auto grey = hint(req, "grey", "the alternative");
  const double mode = rng.uniform01();
  if (mode < 0.05) return grey + " is great, though " + pink + " is also worth a look.";
  if (mode < 0.08) return "Have you looked at " + grey + "? Some compare it to " + misspell(pink, rng) + ".";
  const std::vector<std::string> clean = {
      "That sounds like a great fit for " + grey + "; it has everything you described.",
      "I'd suggest giving " + grey + " another look, it matches what you care about.",
      "Based on what you said, " + grey + " is probably the best way to go.",
  };
  return rng.pick(clean);
}

std::string gen_eval_turn(const ChatRequest& req, Rng& rng) {
  const auto pink = hint(req, "pink", "the forbidden topic");
  const auto grey = hint(req, "grey", "the alternative");
  const double p = hint(req, "condition") == "prompted" ? 0.13 : 0.33;
  if (rng.bernoulli(p)) return "You should definitely check out " + pink + ".";
  return "I think " + grey + " would suit you well.";
}

std::string gen_judge(const ChatRequest& req) {
  const auto pink = hint(req, "pink");
  const auto response = hint(req, "response");
  const bool mentioned = !pink.empty() && text::normalize(response).find(text::normalize(pink)) != std::string::npos;
  return mentioned ? "Yes, the agent mentions " + pink + "." : "No, the agent does not mention " + pink + ".";
}

std::string gen_filler(Rng& rng) {
  std::string out;
  const std::size_t words = 8 + rng.index(16);
  for (std::size_t i = 0; i < words; ++i) {
    if (i) out += ' ';
    out += rng.pick(kFiller);
  }
  return capitalize(out) + ".";
}

std::size_t word_count(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

}  // namespace

MockBackend::MockBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {}

void MockBackend::set_responder(Responder r) { responder_ = std::move(r); }
void MockBackend::set_fault(Fault f) { fault_ = std::move(f); }

void MockBackend::pin_embedding(const std::string& text, Embedding v) {
  if (v.size() > cfg_.mock.embed_dim) {
    throw std::invalid_argument("pinned embedding longer than embed_dim (" + std::to_string(cfg_.mock.embed_dim) + ")");
  }
  v.resize(cfg_.mock.embed_dim, 0.0);  // shares a basis with the hashed vectors
  std::lock_guard lock(mu_);
  pinned_[text::normalize(text)] = std::move(v);
}

std::vector<MockBackend::LedgerEntry> MockBackend::ledger() const {
  std::lock_guard lock(mu_);
  return ledger_;
}

std::string MockBackend::prompt_text(const ChatRequest& req) {
  std::string s;
  for (const auto& m : req.messages) {
    s += std::to_string(static_cast<int>(m.role));
    s += '\x1e';
    s += m.content;
    s += '\x1d';
  }
  return s;
}

ChatResponse MockBackend::generate(const ChatRequest& req) const {
  const auto prompt = prompt_text(req);
  const std::uint64_t seed = req.sampling.seed.value_or(0);
  Rng rng(hash64(req.tag + '\x1f' + prompt + '\x1f' + std::to_string(seed) + '\x1f' + std::to_string(cfg_.mock.seed)));

  ChatResponse r;
  r.model = cfg_.model;
  if (req.tag == tags::kTopics) {
    r.text = gen_topics(req, rng);
  } else if (req.tag == tags::kPeps) {
    r.text = gen_peps(req, rng);
  } else if (req.tag == tags::kAttributes) {
    r.text = gen_attributes(req, rng);
  } else if (req.tag == tags::kDialogue) {
    r.text = gen_dialogue(req, rng);
  } else if (req.tag == tags::kCritique) {
    r.text = gen_critique(req, rng);
  } else if (req.tag == tags::kRevision) {
    r.text = gen_revision(req, rng);
  } else if (req.tag == tags::kEvalTurn) {
    r.text = gen_eval_turn(req, rng);
  } else if (req.tag == tags::kJudge) {
    r.text = gen_judge(req);
  } else {
    r.text = gen_filler(rng);
  }
  r.usage.prompt_tokens = word_count(prompt);
  r.usage.completion_tokens = word_count(r.text);
  if (req.want_logprobs && cfg_.mock.logprobs) {
    std::vector<double> lps(std::max<std::size_t>(r.usage.completion_tokens, 1));
    for (auto& lp : lps) lp = -rng.uniform(0.05, 2.5);
    r.usage.completion_tokens = lps.size();
    r.token_logprobs = std::move(lps);
  }
  return r;
}

ChatResponse MockBackend::complete(const ChatRequest& req) {
  const std::size_t call = calls_.fetch_add(1);
  const std::size_t now = in_flight_.fetch_add(1) + 1;
  std::size_t seen = max_in_flight_.load();
  while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
  }
  struct Leave {
    std::atomic<std::size_t>& c;
    ~Leave() { c.fetch_sub(1); }
  } leave{in_flight_};

  if (cfg_.mock.latency.count() > 0) std::this_thread::sleep_for(cfg_.mock.latency);
  if (fault_) fault_(req, call);
  if (cfg_.mock.fail_after_calls > 0 && successes_.load() >= cfg_.mock.fail_after_calls) {
    throw TransientError("mock: injected failure", 500);
  }

  std::optional<ChatResponse> scripted;
  if (responder_) scripted = responder_(req, call);
  ChatResponse r = scripted ? std::move(*scripted) : generate(req);
  if (r.model.empty()) r.model = cfg_.model;

  successes_.fetch_add(1);
  std::lock_guard lock(mu_);
  ledger_.push_back({req.tag, sha256_hex(prompt_text(req)).substr(0, 16), req.sampling.seed.value_or(0)});
  return r;
}

std::vector<Embedding> MockBackend::embed(const std::vector<std::string>& texts) {
  calls_.fetch_add(1);
  if (cfg_.mock.fail_after_calls > 0 && successes_.load() >= cfg_.mock.fail_after_calls) {
    throw TransientError("mock: injected failure", 500);
  }
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    const auto key = text::normalize(t);
    {
      std::lock_guard lock(mu_);
      if (auto it = pinned_.find(key); it != pinned_.end()) {
        out.push_back(it->second);
        continue;
      }
    }
    Rng rng(hash64("embed\x1f" + std::to_string(cfg_.mock.seed) + '\x1f' + key));
    Embedding v(cfg_.mock.embed_dim);
    double norm = 0.0;
    for (auto& x : v) {
      x = rng.uniform(-1.0, 1.0);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace dpf::llmio
