//! `J_ν(z)` against reference values computed at 40 significant digits.

use ptdiff::special::bessel_j;

#[rustfmt::skip]
const REFERENCE: &[(f64, f64, f64)] = &[
    (-1.5, 0.01, -797.924454033555339),
    (-1.5, 1.0, -1.1024955751601791699),
    (-1.5, 3.7, 0.31485524878902764682),
    (-1.5, 8.5, -0.19914087157054970478),
    (-1.5, 12.0, 0.10739150230314739995),
    (-1.5, 17.3, 0.19155143696620703588),
    (-1.5, 24.9, 0.030631134840920655934),
    (-1.5, 25.1, -0.0011281736993982819496),
    (-1.5, 33.0, -0.13882575140522359985),
    (-1.5, 60.0, 0.033032539244771044933),
    (-1.5, 120.0, -0.042783907062784127828),
    (-1.5, 200.0, 0.049133090737118573826),
    (-5.0 / 6.0, 0.01, 14.855661336842238687),
    (-5.0 / 6.0, 1.0, -0.11054663125868304619),
    (-5.0 / 6.0, 3.7, -0.17440789695721882313),
    (-5.0 / 6.0, 8.5, -0.25501956188073367233),
    (-5.0 / 6.0, 12.0, 0.23043757373557040653),
    (-5.0 / 6.0, 17.3, 0.10155526556837835948),
    (-5.0 / 6.0, 24.9, 0.15279339199231451817),
    (-5.0 / 6.0, 25.1, 0.13980982751620415468),
    (-5.0 / 6.0, 33.0, -0.071846907039990662495),
    (-5.0 / 6.0, 60.0, -0.06898172529336966921),
    (-5.0 / 6.0, 120.0, 0.030089753669995002217),
    (-5.0 / 6.0, 200.0, 0.048471618697837199085),
    (-0.75, 0.01, 14.667226224791341716),
    (-0.75, 1.0, 0.044701115814504631055),
    (-0.75, 3.7, -0.2280731825613793139),
    (-0.75, 8.5, -0.23858804057075535863),
    (-0.75, 12.0, 0.22748429177077274188),
    (-0.75, 17.3, 0.078758857465602339599),
    (-0.75, 24.9, 0.15771281568540714876),
    (-0.75, 25.1, 0.14871866363451531895),
    (-0.75, 33.0, -0.055458669139507899354),
    (-0.75, 60.0, -0.078449770804890573763),
    (-0.75, 120.0, 0.038524216098430867465),
    (-0.75, 200.0, 0.044276757326980539577),
    (-0.25, 0.01, 3.068733870674654747),
    (-0.25, 1.0, 0.66938481726157445152),
    (-0.25, 3.7, -0.40939494601579605867),
    (-0.25, 8.5, -0.065639489057607994683),
    (-0.25, 12.0, 0.13075993131132577344),
    (-0.25, 17.3, -0.070584544960194423273),
    (-0.25, 24.9, 0.12926655598084164906),
    (-0.25, 25.1, 0.14480486752041916619),
    (-0.25, 33.0, 0.0518079251815378187),
    (-0.25, 60.0, -0.10263740153792042999),
    (-0.25, 120.0, 0.070984153222773776037),
    (-0.25, 200.0, 0.0065130373640730912449),
    (0.0, 0.01, 0.99997500015624956597),
    (0.0, 1.0, 0.76519768655796655145),
    (0.0, 3.7, -0.39923020337119110577),
    (0.0, 8.5, 0.041939251842934503552),
    (0.0, 12.0, 0.047689310796833536624),
    (0.0, 17.3, -0.13370064707576429494),
    (0.0, 24.9, 0.083245968353015681694),
    (0.0, 25.1, 0.10827567149994928907),
    (0.0, 33.0, 0.097270672235509462797),
    (0.0, 60.0, -0.091471804089061869531),
    (0.0, 120.0, 0.071823415829156127576),
    (0.0, 200.0, -0.015437439930565091592),
    (1.0 / 3.0, 0.01, 0.19148747117327940903),
    (1.0 / 3.0, 1.0, 0.73087640216944804775),
    (1.0 / 3.0, 3.7, -0.29745638984286395681),
    (1.0 / 3.0, 8.5, 0.17010080971807143348),
    (1.0 / 3.0, 12.0, -0.070321367704581810823),
    (1.0 / 3.0, 17.3, -0.18438939343100145044),
    (1.0 / 3.0, 24.9, 0.0042000193482484095912),
    (1.0 / 3.0, 25.1, 0.035730475018115350582),
    (1.0 / 3.0, 33.0, 0.1337468768678360328),
    (1.0 / 3.0, 60.0, -0.055618147270528142762),
    (1.0 / 3.0, 120.0, 0.05617030040535699563),
    (1.0 / 3.0, 200.0, -0.040491219246916073251),
    (0.5, 0.01, 0.079787126279334219655),
    (0.5, 1.0, 0.67139670714180309042),
    (0.5, 3.7, -0.21977625985052777764),
    (0.5, 8.5, 0.21852368211974226491),
    (0.5, 12.0, -0.12358853595594194375),
    (0.5, 17.3, -0.1917869424635648432),
    (0.5, 24.9, -0.03687956258717677693),
    (0.5, 25.1, -0.0052133943692701785279),
    (0.5, 33.0, 0.13888163197664268147),
    (0.5, 60.0, -0.031397461182520413009),
    (0.5, 120.0, 0.042289722539691499581),
    (0.5, 200.0, -0.049270523842854474976),
    (0.75, 0.01, 0.020458615494436246276),
    (0.75, 1.0, 0.55865249320489174775),
    (0.75, 3.7, -0.085571805841392800995),
    (0.75, 8.5, 0.2639214305522894109),
    (0.75, 12.0, -0.18692884269109782374),
    (0.75, 17.3, -0.17941441364101325048),
    (0.75, 24.9, -0.092809415918210208583),
    (0.75, 25.1, -0.064833963477533275299),
    (0.75, 33.0, 0.12926687790576163353),
    (0.75, 60.0, 0.0082684278148276085687),
    (0.75, 120.0, 0.016469144894390899004),
    (0.75, 200.0, -0.056033686617371437842),
    (1.0, 0.01, 0.0049999375002604161241),
    (1.0, 1.0, 0.44005058574493351596),
    (1.0, 3.7, 0.053833987745461864015),
    (1.0, 8.5, 0.27312196367405374427),
    (1.0, 12.0, -0.22344710449062761237),
    (1.0, 17.3, -0.14142333549201389689),
    (1.0, 24.9, -0.13485569953140874334),
    (1.0, 25.1, -0.11463478413442272782),
    (1.0, 33.0, 0.1006196491151174953),
    (1.0, 60.0, 0.046598383758166317869),
    (1.0, 120.0, -0.011805211433001891117),
    (1.0, 200.0, -0.054304538182378222711),
    (1.75, 0.01, 0.00005845349078219440842),
    (1.75, 1.0, 0.1685939225457631701),
    (1.75, 3.7, 0.37470367337739357178),
    (1.75, 8.5, 0.1122138591550708319),
    (1.75, 12.0, -0.15412603664771300141),
    (1.75, 17.3, 0.055028381927736626989),
    (1.75, 24.9, -0.13485748465061334837),
    (1.75, 25.1, -0.14867940717047095555),
    (1.75, 33.0, -0.045932158004003198994),
    (1.75, 60.0, 0.10284411223329112021),
    (1.75, 120.0, -0.0707782889115938898),
    (1.75, 200.0, -0.0069332900137033770287),
];

#[test]
fn matches_high_precision_reference() {
    for &(nu, z, want) in REFERENCE {
        let got = bessel_j(nu, z).unwrap();
        // Relative to the value, or to the oscillation envelope near a zero.
        let envelope = (2.0 / (std::f64::consts::PI * z)).sqrt().min(1.0);
        let scale = want.abs().max(1e-3 * envelope);
        assert!(
            (got - want).abs() <= 1e-10 * scale,
            "J_{nu}({z}) = {got}, want {want}"
        );
    }
}

#[test]
fn third_order_at_one() {
    let v = bessel_j(1.0 / 3.0, 1.0).unwrap();
    assert!((v - 0.730_876_402_169_448_05).abs() < 1e-14, "{v}");
}
