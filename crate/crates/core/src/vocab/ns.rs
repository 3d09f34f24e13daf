//! Namespace constants. Each term is exposed as a `&str` constant and as a
//! function returning a shared [`Iri`].

macro_rules! terms {
    ($ns:expr; $($const_name:ident, $fn_name:ident => $local:expr;)*) => {
        $(
            pub const $const_name: &str = concat!($ns, $local);
            pub fn $fn_name() -> $crate::rdf::Iri {
                static CELL: std::sync::LazyLock<$crate::rdf::Iri> =
                    std::sync::LazyLock::new(|| $crate::rdf::Iri::new($const_name).expect("static IRI"));
                CELL.clone()
            }
        )*
    };
}

pub mod rdf {
    pub const NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    terms! { "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
        TYPE, type_ => "type";
        LANG_STRING, lang_string => "langString";
        PROPERTY, property => "Property";
    }
}

pub mod rdfs {
    pub const NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    terms! { "http://www.w3.org/2000/01/rdf-schema#";
        LABEL, label => "label";
        SEE_ALSO, see_also => "seeAlso";
        CLASS, class => "Class";
        SUB_PROPERTY_OF, sub_property_of => "subPropertyOf";
        COMMENT, comment => "comment";
    }
}

pub mod xsd {
    pub const NS: &str = "http://www.w3.org/2001/XMLSchema#";
    terms! { "http://www.w3.org/2001/XMLSchema#";
        STRING, string => "string";
        BOOLEAN, boolean => "boolean";
        DECIMAL, decimal => "decimal";
        INTEGER, integer => "integer";
        DOUBLE, double => "double";
        FLOAT, float => "float";
        DATE_TIME, date_time => "dateTime";
        DATE, date => "date";
        ANY_URI, any_uri => "anyURI";
    }

    const INTEGER_DERIVED: &[&str] = &[
        "integer", "long", "int", "short", "byte", "nonNegativeInteger", "nonPositiveInteger",
        "positiveInteger", "negativeInteger", "unsignedLong", "unsignedInt", "unsignedShort",
        "unsignedByte",
    ];

    /// Local name within the XSD namespace, if any.
    pub fn local(datatype: &str) -> Option<&str> {
        datatype.strip_prefix(NS)
    }

    pub fn is_integer_type(datatype: &str) -> bool {
        local(datatype).is_some_and(|l| INTEGER_DERIVED.contains(&l))
    }

    pub fn is_numeric(datatype: &str) -> bool {
        is_integer_type(datatype)
            || matches!(local(datatype), Some("decimal" | "double" | "float"))
    }
}

pub mod owl {
    pub const NS: &str = "http://www.w3.org/2002/07/owl#";
    terms! { "http://www.w3.org/2002/07/owl#";
        SAME_AS, same_as => "sameAs";
    }
}

pub mod dqv {
    pub const NS: &str = "http://www.w3.org/ns/dqv#";
    terms! { "http://www.w3.org/ns/dqv#";
        DIMENSION, dimension => "Dimension";
        METRIC, metric => "Metric";
        QUALITY_MEASUREMENT, quality_measurement => "QualityMeasurement";
        IS_MEASUREMENT_OF, is_measurement_of => "isMeasurementOf";
        VALUE, value => "value";
        IN_DIMENSION, in_dimension => "inDimension";
        COMPUTED_ON, computed_on => "computedOn";
        PRECISION, precision => "precision";
    }
}

/// Energy linked-data quality extension.
pub mod eldv {
    pub const NS: &str = "urn:eldv#";
    terms! { "urn:eldv#";
        ACCESSIBILITY, accessibility => "accessibility";
        CONSISTENCY, consistency => "consistency";
        RDF_LEVEL, rdf_level => "RDFLevel";
        TASKS_DEPENDENT, tasks_dependent => "tasksDependent";
        CLUSTERING_DATA_INTERLINKING, clustering_data_interlinking => "clusteringDataInterlinking";
        SUPPORT_VECTOR_REGRESSION, support_vector_regression => "supportVectorRegression";
        ASSOCIATION_RULE_MINING, association_rule_mining => "associationRuleMining";
        ETL, etl => "etl";
        IMPROVEMENT_METHOD, improvement_method => "ImprovementMethod";
        PRECISION, precision => "precision";
        UNIT, unit => "unit";
        SOURCE, source => "source";
        GENERATED_AT, generated_at => "generatedAt";
        OBSERVED_AT, observed_at => "observedAt";
        ORIGINAL_OBSERVED_AT, original_observed_at => "originalObservedAt";
        IMPUTED_BY, imputed_by => "imputedBy";
        FLAGGED_OUTLIER, flagged_outlier => "flaggedOutlier";
    }

    /// IRI naming a quality metric, e.g. `eldv:completenessMetric`.
    pub fn metric(metric_id: &str) -> crate::rdf::Iri {
        crate::rdf::Iri::new(format!("{NS}{metric_id}Metric")).expect("metric ids are IRI-safe")
    }
}

/// Namespaces whose terms count as declared without appearing in any
/// vocabulary graph.
pub const CORE_NAMESPACES: &[&str] = &[rdf::NS, rdfs::NS, xsd::NS, dqv::NS];

/// Prefix table used when writing Turtle.
pub const TURTLE_PREFIXES: &[(&str, &str)] = &[
    ("rdf", rdf::NS),
    ("rdfs", rdfs::NS),
    ("xsd", xsd::NS),
    ("owl", owl::NS),
    ("dqv", dqv::NS),
    ("eldv", eldv::NS),
];
