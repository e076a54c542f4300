use super::model::SeqModel;
use super::KdError;

/// Negative log-likelihood of `target` (which must end with EOS) under
/// teacher forcing.
pub fn mle_loss(model: &dyn SeqModel, input: &[String], target: &[usize]) -> Result<f64, KdError> {
    let vocab = model.vocab();
    if target.last() != Some(&vocab.eos()) {
        return Err(KdError::MissingEos);
    }
    let mut loss = 0.0;
    for (t, &tok) in target.iter().enumerate() {
        if tok >= vocab.len() {
            return Err(KdError::UnknownToken(tok.to_string()));
        }
        let p = model.next_dist(&target[..t], input)[tok];
        if p <= 0.0 {
            return Err(KdError::ZeroProbability { step: t, token: vocab.token(tok).to_string() });
        }
        loss -= p.ln();
    }
    Ok(loss)
}

/// `KL(p || q) = sum p log(p / q)`. Returns the index where `q` is zero
/// but `p` is not.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64, usize> {
    let mut kl = 0.0;
    for (i, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(i);
            }
            kl += pi * (pi / qi).ln();
        }
    }
    Ok(kl.max(0.0))
}

/// Token-level distillation loss along the teacher-forced prefixes of
/// `target`: `sum_t KL(student(. | y_<t, x) || teacher(. | y_<t, x*))`.
/// The student reads `input`, the teacher reads `teacher_input`.
pub fn token_kd_loss(
    student: &dyn SeqModel,
    teacher: &dyn SeqModel,
    input: &[String],
    teacher_input: &[String],
    target: &[usize],
) -> Result<f64, KdError> {
    if student.vocab() != teacher.vocab() {
        return Err(KdError::VocabMismatch);
    }
    let mut total = 0.0;
    for t in 0..target.len() {
        let p = student.next_dist(&target[..t], input);
        let q = teacher.next_dist(&target[..t], teacher_input);
        total += kl_divergence(&p, &q)
            .map_err(|i| KdError::SupportMismatch { step: t, token: student.vocab().token(i).to_string() })?;
    }
    Ok(total)
}
