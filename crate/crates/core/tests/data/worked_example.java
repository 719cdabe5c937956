import com.google.common.primitives.Ints;
import java.util.Optional;
public class Main{
    public static void 
    main(String[] args){
        String myString = "empty";
        int foo = 0;
        foo = Optional.ofNullable(Ints.tryParse(myString)
             .orElse(0))
             .orElse(0);
    }
}
