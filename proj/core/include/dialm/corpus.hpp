/*
 * corpus.hpp --
 *      Annotated spoken-dialog transcripts: tokens, turns, repair
 *      annotations, parsing and canonical serialization, token
 *      normalization, validation, automatic word-correspondence
 *      alignment, per-word gold tag derivation, and cross-validation
 *      fold splitting.
 */

#ifndef DIALM_CORPUS_HPP
#define DIALM_CORPUS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dialm {

/* ---------------------------------------------------------------- tagset */

// Fixed POS tagset for dialog transcripts, plus pseudo tags used for the
// turn marker, word fragments, and the utterance tags that get spliced
// into classification trees.
namespace tagset {

// True iff `pos` is one of the base POS tags (TURN and FRAGMENT included).
bool is_known(const std::string& pos);

// Discourse-marker POS tags.
bool is_discourse_marker(const std::string& pos);

// Filled-pause POS tag ("um", "uh", ...).
inline const char* filled_pause() { return "UH_FP"; }

inline const char* turn_tag() { return "TURN"; }
inline const char* fragment_tag() { return "FRAGMENT"; }

// Utterance tags spliced into the POS classification tree next to TURN.
// These double as pseudo-words in utterance-sensitive contexts.
inline const char* tone_tag() { return "TONE"; }
inline const char* push_tag() { return "PUSH"; }
inline const char* pop_tag() { return "POP"; }
inline const char* mod_tag() { return "MOD"; }
inline const char* can_tag() { return "CAN"; }
inline const char* abr_tag() { return "ABR"; }

// All base tags in a stable order (for iteration and serialization).
const std::vector<std::string>& all_base_tags();

// Collapse map used when POS scoring ignores discourse-marker confusions:
// CC_D->CC, RB_D->RB, AC->UH_FP, UH_D->UH_FP; other tags map to themselves.
std::string collapse_discourse_marker(const std::string& pos);

}  // namespace tagset

/* ---------------------------------------------------------------- tokens */

// Reserved surfaces.
inline const char* turn_token() { return "<turn>"; }
inline const char* fragment_token() { return "<fragment>"; }

constexpr double kNoSilence = -1.0;

struct Token {
    std::string surface;
    std::string pos;            // two tags joined by '^' for contractions
    bool is_fragment = false;   // surface ends with "-" (or is <fragment>)
    std::vector<std::string> labels;  // annotation labels, sorted on parse

    bool has_label(const std::string& l) const;
    bool has_tone() const { return has_label("tone"); }
    bool is_editing_term() const { return has_label("et"); }
};

enum class RepairKind : std::uint8_t { Mod, Can, Abr };

const char* repair_kind_name(RepairKind k);

enum class CorrKind : std::uint8_t { Match, Replace, MultiWord, Delete, Insert };

// One word correspondence (or deletion/insertion) of a repair.  Match,
// Replace and MultiWord link a reparandum token to an alteration token;
// Delete/Insert reference a single token.
struct Correspondence {
    CorrKind kind = CorrKind::Match;
    int co_index = 0;          // label index; 0 when derived automatically
    int reparandum_tok = -1;   // token position, -1 if n/a (Insert)
    int alteration_tok = -1;   // token position, -1 if n/a (Delete)
};

struct RepairAnnotation {
    int index = 0;             // multiples of 10; 0 for the unmarked repair
    RepairKind kind = RepairKind::Mod;
    bool ambiguous = false;    // annotator unsure of the kind (mod+/can+)
    int ip_position = -1;      // last reparandum token (pre-editing-term
                               // token for abridged repairs)
    int et_begin = 0, et_end = 0;   // editing-term token range [begin,end)
    int reparandum_onset = -1;      // first reparandum token; -1 for Abr
    std::vector<Correspondence> correspondences;

    bool has_editing_term() const { return et_end > et_begin; }
    int alteration_begin() const { return has_editing_term() ? et_end : ip_position + 1; }
};

struct Turn {
    std::string speaker;
    std::string id;
    std::vector<Token> tokens;
    // silences[i] = duration of the gap after tokens[i] in seconds, or
    // kNoSilence when the transcript does not give one.  The gap after the
    // last real token is the turn-final gap.
    std::vector<double> silences;
    std::vector<RepairAnnotation> repairs;   // ordered by interruption point

    bool has_silence(int gap) const;
    bool turn_final_tone() const;
};

struct Dialog {
    std::string id;
    std::vector<Turn> turns;
};

struct Corpus {
    std::vector<Dialog> dialogs;

    std::size_t turn_count() const;
    std::size_t token_count() const;
};

/* ------------------------------------------------------------- gold tags */

enum class ToneTag : std::uint8_t { None, Tone };
enum class EtTag : std::uint8_t { None, Push, ET, Pop };
enum class RepTag : std::uint8_t { None, Mod, Can, Abr };
enum class CorrTag : std::uint8_t { None, Match, Replace, Insert };

const char* tone_tag_name(ToneTag t);
const char* et_tag_name(EtTag e);
const char* rep_tag_name(RepTag r);
const char* corr_tag_name(CorrTag c);

// Per-word-position tag assignment.  Position i covers the transition from
// token i-1 to token i of the normalized turn; the final position predicts
// the <turn> token.
struct WordGold {
    ToneTag t = ToneTag::None;
    EtTag e = EtTag::None;
    RepTag r = RepTag::None;
    int onset = -1;       // removed-speech onset token, when r is Mod/Can
    int licensor = -1;    // reparandum token licensing this word, -1 = none
    CorrTag c = CorrTag::None;
    int repair_index = -1;  // annotation index of the repair r refers to
};

struct GoldTags {
    std::vector<WordGold> word;   // one entry per normalized token

    int size() const { return static_cast<int>(word.size()); }
};

/* ------------------------------------------------------------ operations */

class ParseError : public std::runtime_error {
  public:
    ParseError(int line, int column, const std::string& what);
    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_, column_;
};

// Parse a transcript.  Grammar:
//   #DIALOG <id>
//   #TURN <speaker> <id>
//   items...
// where each item is `surface/POS[|label,label,...]` or `<sil=SECONDS>`.
// Repair annotations are materialized from the ip/sr</m/r/p/x/et labels.
Corpus parse_corpus(std::istream& in);
Corpus parse_corpus_file(const std::string& path);

// Canonical text form: one header line per dialog and turn, one line with
// all of a turn's items, labels sorted.  parse(serialize(c)) == c.
void serialize_corpus(const Corpus& corpus, std::ostream& out);
std::string serialize_corpus(const Corpus& corpus);

// Split contractions into their component words, replace fragment surfaces
// by <fragment>, and append the <turn> token.  Repair annotations and
// silences are re-indexed onto the new token positions.
Turn normalize_tokens(const Turn& turn);
Corpus normalize_corpus(const Corpus& corpus);

// Fill in the word correspondences of `repair` (whose extent is fixed) by
// a maximal cross-serial alignment between the reparandum and the
// resumption.  Matches require identical surface and POS, replacements
// identical POS; the alignment maximizes 2*matches + replacements, with
// ties broken by the leftmost alignment.  Unmatched reparandum words
// become deletions; skipped resumption words before the last
// correspondence become insertions.  The resumption window ends at the
// next repair's interruption point.
RepairAnnotation derive_correspondences(const RepairAnnotation& repair, const Turn& turn);

// Derive the per-position tone, editing-term, repair, onset, licensor and
// correspondence tags of a normalized turn from its annotations.
GoldTags derive_gold_tags(const Turn& turn);

// A single validation finding.
struct Violation {
    std::string dialog;
    std::string turn;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool clean() const { return violations.empty(); }
    std::string to_string() const;
};

// Report-only checks: repair index spacing, correspondence co-index
// ranges, crossing correspondences, editing-term contiguity, reparandum
// onsets that violate the branching structure, unknown POS labels, and
// tone labels on fragments.
ValidationReport validate(const Corpus& corpus);

// Deterministic k-fold split; dialogs are never divided and speaker pairs
// are spread across folds as evenly as possible.
std::vector<std::pair<Corpus, Corpus>> partition_folds(const Corpus& corpus, int k,
                                                       std::uint64_t seed);

// Deterministic by-turn split of a training corpus into growing and
// heldout portions; `ratio` is the growing share.
std::pair<Corpus, Corpus> split_growing_heldout(const Corpus& train, double ratio,
                                                std::uint64_t seed);

}  // namespace dialm

#endif /* DIALM_CORPUS_HPP */
