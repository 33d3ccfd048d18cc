#include "twist/store.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are unsupported");
static_assert(sizeof(double) == 8);

namespace twist {

namespace {

constexpr char kDsfMagic[4] = {'T', 'W', 'D', 'S'};
constexpr char kEsfMagic[4] = {'T', 'W', 'E', 'S'};
constexpr char kDatasetMagic[4] = {'T', 'W', 'D', 'T'};

class ByteWriter {
public:
    void magic(const char (&m)[4]) {
        const auto* b = reinterpret_cast<const std::byte*>(m);
        buf_.insert(buf_.end(), b, b + 4);
    }
    template <typename T>
    void put(T value) {
        const auto* b = reinterpret_cast<const std::byte*>(&value);
        buf_.insert(buf_.end(), b, b + sizeof(T));
    }
    void put_doubles(std::span<const double> values) {
        const auto* b = reinterpret_cast<const std::byte*>(values.data());
        buf_.insert(buf_.end(), b, b + values.size() * sizeof(double));
    }
    std::vector<std::byte> take() { return std::move(buf_); }

private:
    std::vector<std::byte> buf_;
};

class ByteReader {
public:
    ByteReader(std::span<const std::byte> data, std::string name)
        : data_(data), name_(std::move(name)) {}

    void expect_magic(const char (&m)[4]) {
        if (data_.size() - pos_ < 4 || std::memcmp(data_.data() + pos_, m, 4) != 0) {
            throw_io(name_ + ": bad magic");
        }
        pos_ += 4;
    }
    template <typename T>
    T get() {
        if (data_.size() - pos_ < sizeof(T)) throw_io(name_ + ": truncated file");
        T value;
        std::memcpy(&value, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }
    void get_doubles(std::vector<double>& out, std::size_t count) {
        if (data_.size() - pos_ < count * sizeof(double)) {
            throw_io(name_ + ": truncated file");
        }
        out.resize(count);
        std::memcpy(out.data(), data_.data() + pos_, count * sizeof(double));
        pos_ += count * sizeof(double);
    }
    void expect_end() const {
        if (pos_ != data_.size()) throw_io(name_ + ": trailing bytes");
    }

private:
    std::span<const std::byte> data_;
    std::size_t pos_ = 0;
    std::string name_;
};

void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw_io("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw_io("write failed for " + path.string());
}

std::vector<std::byte> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw_io("cannot open " + path.string());
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::vector<std::byte> bytes(size);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!in) throw_io("read failed for " + path.string());
    return bytes;
}

std::vector<std::byte> encode_sequences(const char (&magic)[4],
                                        const std::vector<TimeSeries>& sequences) {
    const std::size_t n = sequences.empty() ? 0 : sequences.front().length();
    ByteWriter w;
    w.magic(magic);
    w.put<std::uint16_t>(kFormatVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(n));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(sequences.size()));
    for (const TimeSeries& s : sequences) {
        if (s.length() != n) throw_invalid("unequal sequence lengths in page payload");
        w.put_doubles(s.values);
    }
    for (const TimeSeries& s : sequences) w.put<std::uint64_t>(s.id);
    return w.take();
}

std::vector<TimeSeries> decode_sequences(const char (&magic)[4],
                                         std::span<const std::byte> bytes,
                                         const std::string& name) {
    ByteReader r(bytes, name);
    r.expect_magic(magic);
    const auto version = r.get<std::uint16_t>();
    if (version != kFormatVersion) throw_io(name + ": unsupported format version");
    const auto n = r.get<std::uint32_t>();
    const auto count = r.get<std::uint32_t>();
    std::vector<TimeSeries> sequences(count);
    for (auto& s : sequences) r.get_doubles(s.values, n);
    for (auto& s : sequences) s.id = r.get<std::uint64_t>();
    r.expect_end();
    return sequences;
}

} // namespace

void IndexConfig::validate() const {
    if (n == 0) throw_invalid("index sequence length must be positive");
    if (max_page_size < 1) throw_invalid("max page size must be at least 1");
    if (constraint.length() != n) throw_invalid("constraint length must equal n");
    if (ladder.empty()) throw_invalid("resolution ladder must not be empty");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (ladder[i] < 1 || ladder[i] > n) throw_invalid("ladder values must lie in [1, n]");
        if (i > 0 && ladder[i] >= ladder[i - 1]) {
            throw_invalid("resolution ladder must be strictly decreasing");
        }
    }
    if (params.p < 1) throw_invalid("p must be a positive integer");
}

double page_access_count(const AccessStats& stats, double speedup_factor, AccessMode mode) {
    if (!(speedup_factor > 0.0)) throw_invalid("speedup factor must be positive");
    const double passes = mode == AccessMode::Lbg ? 2.0 : 1.0;
    return (passes * static_cast<double>(stats.esf_envelope_reads) +
            static_cast<double>(stats.candidate_sequences_read)) /
               speedup_factor +
           static_cast<double>(stats.dsf_random_accesses);
}

std::filesystem::path dsf_path(const std::filesystem::path& dir, PageId id) {
    return dir / ("page_" + std::to_string(id) + ".dsf");
}

std::filesystem::path esf_path(const std::filesystem::path& dir) { return dir / "index.esf"; }

std::filesystem::path manifest_path(const std::filesystem::path& dir) {
    return dir / "manifest.txt";
}

std::vector<std::byte> encode_dsf(const DsfPage& page) {
    return encode_sequences(kDsfMagic, page.sequences);
}

void write_dsf(const std::filesystem::path& dir, const DsfPage& page) {
    try {
        write_file(dsf_path(dir, page.page_id), encode_dsf(page));
    } catch (const Error& e) {
        throw_io("page " + std::to_string(page.page_id) + ": " + e.what());
    }
}

DsfPage read_dsf(const std::filesystem::path& dir, PageId id) {
    const auto path = dsf_path(dir, id);
    if (!std::filesystem::exists(path)) {
        throw_not_found("page " + std::to_string(id) + " not found in " + dir.string());
    }
    DsfPage page;
    page.page_id = id;
    page.sequences = decode_sequences(kDsfMagic, read_file(path), path.string());
    return page;
}

DsfPage read_dsf_sequential(const std::filesystem::path& dir, PageId id, AccessStats& stats) {
    DsfPage page = read_dsf(dir, id);
    stats.candidate_sequences_read += page.size();
    stats.dsf_random_accesses += 1;
    return page;
}

void erase_dsf(const std::filesystem::path& dir, PageId id) {
    std::error_code ec;
    std::filesystem::remove(dsf_path(dir, id), ec);
    if (ec) throw_io("cannot remove page " + std::to_string(id) + ": " + ec.message());
}

std::vector<std::byte> encode_esf(const std::vector<EsfRecord>& records, std::size_t n) {
    ByteWriter w;
    w.magic(kEsfMagic);
    w.put<std::uint16_t>(kFormatVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(n));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(records.size()));
    for (const EsfRecord& rec : records) {
        if (rec.envelope.length() != n) throw_invalid("envelope length mismatch in ESF");
        w.put<std::uint32_t>(rec.page_id);
        w.put_doubles(rec.envelope.upper);
        w.put_doubles(rec.envelope.lower);
        w.put<std::uint32_t>(rec.envelope.member_count);
    }
    return w.take();
}

void write_esf(const std::filesystem::path& dir, const std::vector<EsfRecord>& records,
               std::size_t n) {
    write_file(esf_path(dir), encode_esf(records, n));
}

std::vector<EsfRecord> load_esf(const std::filesystem::path& dir) {
    const auto path = esf_path(dir);
    if (!std::filesystem::exists(path)) throw_io("missing envelope file " + path.string());
    const auto bytes = read_file(path);
    ByteReader r(bytes, path.string());
    r.expect_magic(kEsfMagic);
    if (r.get<std::uint16_t>() != kFormatVersion) {
        throw_io(path.string() + ": unsupported format version");
    }
    const auto n = r.get<std::uint32_t>();
    const auto count = r.get<std::uint32_t>();
    std::vector<EsfRecord> records(count);
    for (auto& rec : records) {
        rec.page_id = r.get<std::uint32_t>();
        r.get_doubles(rec.envelope.upper, n);
        r.get_doubles(rec.envelope.lower, n);
        rec.envelope.member_count = r.get<std::uint32_t>();
    }
    r.expect_end();
    return records;
}

std::vector<EsfRecord> load_esf(const std::filesystem::path& dir, AccessStats& stats) {
    auto records = load_esf(dir);
    stats.esf_envelope_reads += records.size();
    return records;
}

std::string encode_manifest(const IndexConfig& config) {
    std::ostringstream out;
    out << "format=" << kFormatVersion << "\n";
    out << "n=" << config.n << "\n";
    out << "max_page_size=" << config.max_page_size << "\n";
    out << "p=" << config.params.p << "\n";
    out << "apply_root=" << (config.params.apply_root ? 1 : 0) << "\n";
    out << "ladder=";
    for (std::size_t i = 0; i < config.ladder.size(); ++i) {
        if (i) out << ",";
        out << config.ladder[i];
    }
    out << "\n";
    if (config.constraint.is_uniform() && config.constraint.length() > 0) {
        out << "constraint=uniform:" << config.constraint.radius(0) << "\n";
    } else {
        out << "constraint=explicit:";
        for (std::size_t i = 0; i < config.constraint.length(); ++i) {
            if (i) out << ",";
            out << config.constraint.radius(i);
        }
        out << "\n";
    }
    out << "deletion_policy="
        << (config.deletion_policy == DeletionPolicy::Eager ? "eager" : "lazy") << "\n";
    out << "split_seed=" << config.split_seed << "\n";
    out << "rng=mt19937_64-polar\n";
    return out.str();
}

void write_manifest(const std::filesystem::path& dir, const IndexConfig& config) {
    const std::string text = encode_manifest(config);
    std::ofstream out(manifest_path(dir), std::ios::trunc);
    if (!out) throw_io("cannot write manifest in " + dir.string());
    out << text;
    if (!out) throw_io("manifest write failed in " + dir.string());
}

namespace {

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw_io("manifest: bad integer for key " + key);
    }
    return value;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text, const std::string& key) {
    std::vector<std::uint64_t> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(parse_u64(item, key));
    return values;
}

} // namespace

IndexConfig read_manifest(const std::filesystem::path& dir) {
    const auto path = manifest_path(dir);
    std::ifstream in(path);
    if (!in) throw_io("missing manifest " + path.string());

    std::string line;
    std::size_t n = 0;
    IndexConfig config;
    std::string constraint_text;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "format") {
            if (parse_u64(value, key) != kFormatVersion) {
                throw_io("manifest: unsupported format version");
            }
        } else if (key == "n") {
            n = parse_u64(value, key);
        } else if (key == "max_page_size") {
            config.max_page_size = parse_u64(value, key);
        } else if (key == "p") {
            config.params.p = static_cast<int>(parse_u64(value, key));
        } else if (key == "apply_root") {
            config.params.apply_root = parse_u64(value, key) != 0;
        } else if (key == "ladder") {
            config.ladder.clear();
            for (auto v : parse_u64_list(value, key)) config.ladder.push_back(v);
        } else if (key == "constraint") {
            constraint_text = value;
        } else if (key == "deletion_policy") {
            config.deletion_policy =
                value == "lazy" ? DeletionPolicy::Lazy : DeletionPolicy::Eager;
        } else if (key == "split_seed") {
            config.split_seed = parse_u64(value, key);
        }
    }
    config.n = n;
    if (constraint_text.rfind("uniform:", 0) == 0) {
        const auto radius = parse_u64(constraint_text.substr(8), "constraint");
        config.constraint =
            GlobalConstraint(std::vector<std::uint32_t>(n, static_cast<std::uint32_t>(radius)));
    } else if (constraint_text.rfind("explicit:", 0) == 0) {
        std::vector<std::uint32_t> radii;
        for (auto v : parse_u64_list(constraint_text.substr(9), "constraint")) {
            radii.push_back(static_cast<std::uint32_t>(v));
        }
        config.constraint = GlobalConstraint(std::move(radii));
    } else {
        throw_io("manifest: missing or malformed constraint entry");
    }
    config.validate();
    return config;
}

void write_dataset(const std::filesystem::path& file, const std::vector<TimeSeries>& data) {
    write_file(file, encode_sequences(kDatasetMagic, data));
}

std::vector<TimeSeries> read_dataset(const std::filesystem::path& file) {
    if (!std::filesystem::exists(file)) throw_not_found("dataset " + file.string() + " not found");
    return decode_sequences(kDatasetMagic, read_file(file), file.string());
}

std::uint64_t esf_file_bytes(const std::filesystem::path& dir) {
    return static_cast<std::uint64_t>(std::filesystem::file_size(esf_path(dir)));
}

std::uint64_t dsf_total_bytes(const std::filesystem::path& dir,
                              const std::vector<EsfRecord>& records) {
    std::uint64_t total = 0;
    for (const auto& rec : records) {
        total += static_cast<std::uint64_t>(std::filesystem::file_size(dsf_path(dir, rec.page_id)));
    }
    return total;
}

} // namespace twist
