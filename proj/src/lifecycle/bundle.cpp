// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include "reprobe/lifecycle/bundle.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "reprobe/core/codec.hpp"
#include "reprobe/core/error.hpp"

namespace reprobe {

namespace {

constexpr std::size_t kBlock = 512;

[[noreturn]] void malformed(const std::string& why) {
    throw Error(ErrorCode::MalformedBundle, "malformed bundle: " + why);
}

std::string field(const char* p, std::size_t n) {
    std::size_t len = 0;
    while (len < n && p[len] != '\0') ++len;
    return std::string(p, len);
}

std::uint64_t octal(const char* p, std::size_t n) {
    std::uint64_t v = 0;
    std::size_t i = 0;
    while (i < n && (p[i] == ' ' || p[i] == '\0')) ++i;
    bool any = false;
    for (; i < n && p[i] >= '0' && p[i] <= '7'; ++i) {
        v = (v << 3) | static_cast<std::uint64_t>(p[i] - '0');
        any = true;
    }
    for (; i < n; ++i) {
        if (p[i] != ' ' && p[i] != '\0') malformed("bad numeric header field");
    }
    if (!any) return 0;
    return v;
}

bool zero_block(const char* p) {
    return std::all_of(p, p + kBlock, [](char c) { return c == '\0'; });
}

std::uint64_t header_checksum(const char* p) {
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < kBlock; ++i) {
        const bool in_field = i >= 148 && i < 156;
        sum += in_field ? static_cast<unsigned char>(' ') : static_cast<unsigned char>(p[i]);
    }
    return sum;
}

// Pax extended header records: "<len> <key>=<value>\n".
std::string pax_path(std::string_view data) {
    std::string path;
    while (!data.empty()) {
        const auto space = data.find(' ');
        if (space == std::string_view::npos) malformed("bad pax record");
        std::size_t len = 0;
        try {
            len = std::stoul(std::string(data.substr(0, space)));
        } catch (const std::exception&) {
            malformed("bad pax record length");
        }
        if (len <= space || len > data.size()) malformed("bad pax record length");
        const auto record = data.substr(space + 1, len - space - 2);
        if (record.starts_with("path=")) path = std::string(record.substr(5));
        data.remove_prefix(len);
    }
    return path;
}

void put_octal(char* p, std::size_t n, std::uint64_t value) {
    const std::string text = fmt::format("{:0{}o}", value, n - 1);
    if (text.size() > n - 1) throw Error(ErrorCode::Internal, "tar field overflow");
    std::memcpy(p, text.data(), text.size());
    p[n - 1] = '\0';
}

}  // namespace

std::string safe_member_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    if (path.starts_with('/')) return {};
    while (start <= path.size()) {
        auto end = path.find('/', start);
        if (end == std::string_view::npos) end = path.size();
        const auto part = path.substr(start, end - start);
        if (part == "..") return {};
        if (!part.empty() && part != ".") parts.emplace_back(part);
        start = end + 1;
    }
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += '/';
        out += p;
    }
    return out;
}

std::vector<BundleFile> read_tar(std::string_view bytes) {
    if (bytes.empty()) malformed("empty archive");
    if (bytes.size() % kBlock != 0) malformed("archive size is not a multiple of 512");

    std::vector<BundleFile> files;
    std::string long_name;
    std::size_t pos = 0;
    bool ended = false;
    while (pos + kBlock <= bytes.size()) {
        const char* h = bytes.data() + pos;
        if (zero_block(h)) {
            ended = true;
            break;
        }
        if (octal(h + 148, 8) != header_checksum(h)) malformed("header checksum mismatch");
        const std::string magic = field(h + 257, 6);
        if (!magic.starts_with("ustar")) malformed("not a ustar archive");

        const std::uint64_t size = octal(h + 124, 12);
        const char type = h[156];
        pos += kBlock;
        if (size > bytes.size() - pos) malformed("member data is truncated");
        const std::string_view data = bytes.substr(pos, size);
        pos += (size + kBlock - 1) / kBlock * kBlock;

        if (type == 'L') {
            long_name = field(data.data(), data.size());
            continue;
        }
        if (type == 'x') {
            long_name = pax_path(data);
            continue;
        }
        if (type == 'g') continue;

        std::string name = field(h, 100);
        const std::string prefix = field(h + 345, 155);
        if (!prefix.empty()) name = prefix + "/" + name;
        if (!long_name.empty()) {
            name = long_name;
            long_name.clear();
        }
        if (type != '0' && type != '\0') continue;  // directories, links, devices

        std::string path = safe_member_path(name);
        if (path.empty()) malformed("unsafe member path '" + name + "'");
        files.push_back(BundleFile{std::move(path), std::string(data),
                                   static_cast<unsigned>(octal(h + 100, 8) & 07777)});
    }
    if (!ended && files.empty()) malformed("no members");
    return files;
}

std::string write_tar(const std::vector<BundleFile>& files) {
    std::string out;
    for (const auto& f : files) {
        if (f.path.size() > 99) throw Error(ErrorCode::Internal, "member path too long: " + f.path);
        char h[kBlock] = {};
        std::memcpy(h, f.path.data(), f.path.size());
        put_octal(h + 100, 8, f.mode);
        put_octal(h + 108, 8, 0);
        put_octal(h + 116, 8, 0);
        put_octal(h + 124, 12, f.data.size());
        put_octal(h + 136, 12, 0);
        h[156] = '0';
        std::memcpy(h + 257, "ustar", 6);
        std::memcpy(h + 263, "00", 2);
        put_octal(h + 148, 7, header_checksum(h));
        h[155] = ' ';
        out.append(h, kBlock);
        out += f.data;
        out.append((kBlock - f.data.size() % kBlock) % kBlock, '\0');
    }
    out.append(2 * kBlock, '\0');
    return out;
}

Bundle parse_bundle(std::string_view bytes) {
    Bundle bundle;
    bundle.files = read_tar(bytes);
    auto manifest = std::find_if(bundle.files.begin(), bundle.files.end(),
                                 [](const BundleFile& f) { return f.path == "manifest.json"; });
    if (manifest == bundle.files.end()) malformed("no manifest.json at the archive root");

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(manifest->data);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaInvalid, std::string("manifest.json is not JSON: ") + e.what());
    }
    bundle.descriptor = descriptor_from_manifest(doc);
    bundle.descriptor.provenance = Provenance::External;

    const std::string entry = safe_member_path(bundle.descriptor.entry);
    const bool present = !entry.empty() &&
                         std::any_of(bundle.files.begin(), bundle.files.end(),
                                     [&](const BundleFile& f) { return f.path == entry; });
    if (!present) malformed("entry '" + bundle.descriptor.entry + "' is not in the archive");
    bundle.descriptor.entry = entry;
    return bundle;
}

std::filesystem::path extract_bundle(const Bundle& bundle, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (const auto& f : bundle.files) {
        const fs::path target = dir / f.path;
        fs::create_directories(target.parent_path());
        std::ofstream out(target, std::ios::binary | std::ios::trunc);
        out.write(f.data.data(), static_cast<std::streamsize>(f.data.size()));
        if (!out) throw Error(ErrorCode::Internal, "cannot write " + target.string());
    }
    const fs::path entry = fs::absolute(dir / bundle.descriptor.entry);
    fs::permissions(entry,
                    fs::perms::owner_all | fs::perms::group_read | fs::perms::group_exec |
                        fs::perms::others_read | fs::perms::others_exec,
                    fs::perm_options::replace);
    return entry;
}

}  // namespace reprobe
