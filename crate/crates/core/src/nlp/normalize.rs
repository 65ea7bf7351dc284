//! Rule-based noun singularization.

const IRREGULAR: &[(&str, &str)] = &[
    ("men", "man"),
    ("women", "woman"),
    ("people", "person"),
    ("children", "child"),
    ("teeth", "tooth"),
    ("feet", "foot"),
    ("mice", "mouse"),
    ("geese", "goose"),
    ("oxen", "ox"),
    ("buses", "bus"),
    ("taxis", "taxi"),
    ("tvs", "tv"),
    ("cookies", "cookie"),
    ("movies", "movie"),
    ("brownies", "brownie"),
    ("potatoes", "potato"),
    ("tomatoes", "tomato"),
    ("policemen", "policeman"),
    ("firemen", "fireman"),
    ("fishermen", "fisherman"),
    ("businessmen", "businessman"),
    ("gentlemen", "gentleman"),
    ("snowmen", "snowman"),
];

const VES: &[(&str, &str)] = &[
    ("knives", "knife"),
    ("wives", "wife"),
    ("lives", "life"),
    ("leaves", "leaf"),
    ("loaves", "loaf"),
    ("halves", "half"),
    ("shelves", "shelf"),
    ("wolves", "wolf"),
    ("calves", "calf"),
    ("scarves", "scarf"),
    ("thieves", "thief"),
    ("elves", "elf"),
];

/// Words whose surface form is already the base form despite a plural-looking
/// ending.
const INVARIANT: &[&str] = &[
    "sheep",
    "deer",
    "fish",
    "scissors",
    "series",
    "species",
    "news",
    "pants",
    "jeans",
    "shorts",
    "clothes",
    "sunglasses",
    "goggles",
    "fries",
    "chips",
    "lens",
    "canvas",
    "cattle",
];

/// Lowercases and singularizes `word`. Idempotent.
pub fn normalize(word: &str) -> String {
    let w = word.trim().to_lowercase();
    if let Some((_, s)) = IRREGULAR.iter().find(|(p, _)| *p == w) {
        return (*s).to_string();
    }
    if INVARIANT.contains(&w.as_str()) {
        return w;
    }
    if let Some((_, s)) = VES.iter().find(|(p, _)| *p == w) {
        return (*s).to_string();
    }
    if w.len() > 4 && w.ends_with("ies") {
        return format!("{}y", &w[..w.len() - 3]);
    }
    if let Some(stem) = w.strip_suffix("es") {
        if ["ss", "x", "zz", "ch", "sh"].iter().any(|e| stem.ends_with(e)) {
            return stem.to_string();
        }
    }
    if w.len() > 3 && w.ends_with('s') && !["ss", "us", "is"].iter().any(|e| w.ends_with(e)) {
        let stem = &w[..w.len() - 1];
        // `mens` must not become `men`, which a second pass would turn into `man`
        if !IRREGULAR.iter().any(|(p, _)| *p == stem) {
            return stem.to_string();
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::normalize;

    #[test]
    fn irregulars_and_case() {
        assert_eq!(normalize("Women"), "woman");
        assert_eq!(normalize("people"), "person");
        assert_eq!(normalize("MICE"), "mouse");
    }

    #[test]
    fn regular_rules() {
        let cases = [
            ("pizzas", "pizza"),
            ("man", "man"),
            ("puppies", "puppy"),
            ("ties", "tie"),
            ("knives", "knife"),
            ("gloves", "glove"),
            ("glasses", "glass"),
            ("boxes", "box"),
            ("sandwiches", "sandwich"),
            ("dishes", "dish"),
            ("horses", "horse"),
            ("giraffes", "giraffe"),
            ("bus", "bus"),
            ("buses", "bus"),
            ("grass", "grass"),
            ("skis", "skis"),
            ("tennis", "tennis"),
            ("sheep", "sheep"),
            ("guys", "guy"),
            ("tvs", "tv"),
            ("cats", "cat"),
            ("gas", "gas"),
        ];
        for (input, want) in cases {
            assert_eq!(normalize(input), want, "normalize({input})");
        }
    }

    #[test]
    fn idempotent_on_tricky_words() {
        for w in ["glass", "bus", "species", "lives", "ladies", "potatoes", "ski", "skis", "fries", "mens", "peoples"] {
            let once = normalize(w);
            assert_eq!(normalize(&once), once, "{w}");
        }
    }
}
